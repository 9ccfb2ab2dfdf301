mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use typeparam::estimation::{
    abu_update, aga_update, ego_update, ObservedActionLikelihood, ParameterPosterior,
};
use typeparam::foraging::{ForagingKind, ForagingType, FORAGING_BOUNDS};
use typeparam::model::{
    action_probabilities, replay, AgentType, Bounds, ParameterVector, MIN_ACTION_PROB,
};

fn params() -> impl Strategy<Value = ParameterVector> {
    (0.0f64..=1.0, 0.1f64..=1.0, 0.1f64..=1.0)
        .prop_map(|(a, b, c)| ParameterVector::new(vec![a, b, c], FORAGING_BOUNDS.to_vec()).unwrap())
}

fn kind() -> impl Strategy<Value = ForagingKind> {
    (0usize..4).prop_map(|i| ForagingKind::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // A type that lived through the history under one estimate and is then
    // replayed under another behaves exactly like a fresh type that only
    // ever saw the second estimate.
    #[test]
    fn replay_erases_previous_parameters(
        seed in 0u64..10_000,
        len in 1usize..40,
        kind in kind(),
        old in params(),
        new in params(),
    ) {
        let (_, history) = common::random_history(seed, len);
        let template = ForagingType::new(kind, 1);
        let stale = replay(&template, &history, &old).unwrap();

        let (last, prefix) = history.split_last().unwrap();
        let mut adjusted = replay(&stale, prefix, &new).unwrap();
        let via_replay = adjusted.step(&last.world, &new);

        let mut fresh = template.clone();
        let mut via_fresh = None;
        for obs in &history {
            via_fresh = Some(fresh.step(&obs.world, &new));
        }
        let via_fresh = via_fresh.unwrap();
        prop_assert_eq!(via_replay.probs(), via_fresh.probs());
        prop_assert_eq!(adjusted.memory, fresh.memory);
    }

    #[test]
    fn action_probabilities_positive(
        seed in 0u64..10_000,
        len in 1usize..60,
        kind in kind(),
        p in params(),
    ) {
        let (_, history) = common::random_history(seed, len);
        for t in 1..=history.len() {
            let d = action_probabilities(&ForagingType::new(kind, 1), &history[..t], &p).unwrap();
            prop_assert!(d.min_prob() >= MIN_ACTION_PROB);
            prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn estimators_stay_in_bounds(
        seed in 0u64..10_000,
        len in 2usize..25,
        kind in kind(),
        start in params(),
    ) {
        let (_, history) = common::random_history(seed, len);
        let ty = ForagingType::new(kind, 1);
        let t = history.len() - 1;
        let action = history[t].action_of(1).unwrap();
        let f = ObservedActionLikelihood { ty: &ty, history: &history[..t], action };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let aga = aga_update(&f, &start);
        prop_assert!(aga.check_bounds(&FORAGING_BOUNDS).is_ok());

        let (posterior, abu) = abu_update(&ParameterPosterior::uniform(&FORAGING_BOUNDS), &f, &start, &mut rng);
        prop_assert!(abu.check_bounds(&FORAGING_BOUNDS).is_ok());
        for d in posterior.densities() {
            prop_assert!((d.abs_integral() - 1.0).abs() < 1e-6);
        }

        let ego = ego_update(&ty, &history, 1, 10, &mut rng).unwrap();
        prop_assert!(ego.check_bounds(&FORAGING_BOUNDS).is_ok());
    }
}

#[test]
fn out_of_bounds_parameters_rejected() {
    let (_, history) = common::random_history(3, 5);
    let unit = vec![Bounds::new(0.0, 1.0).unwrap(); 3];
    let narrow_view = ParameterVector::new(vec![0.5, 0.05, 0.5], unit).unwrap();
    let ty = ForagingType::new(ForagingKind::L1, 1);
    assert!(action_probabilities(&ty, &history, &narrow_view).is_err());
    let ok = ParameterVector::centre(FORAGING_BOUNDS.to_vec());
    assert!(action_probabilities(&ty, &history, &ok).is_ok());
}
