#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typeparam::foraging::{
    generate_instance, Action, Agent, ForagingState, ForagingType, Heading, Instance, Item, Pos,
    WorldConfig,
};
use typeparam::model::{AgentType, Observation};

/// Plays `len` steps of a generated instance: the controlled agent moves at
/// random, the other agents follow their true types.
pub fn random_history(seed: u64, len: usize) -> (Instance, Vec<Observation<ForagingState>>) {
    let inst = generate_instance(&WorldConfig::SMALL, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut actual: Vec<ForagingType> = inst
        .true_kinds
        .iter()
        .enumerate()
        .map(|(j, &k)| ForagingType::new(k, j + 1))
        .collect();
    let mut world = inst.world.clone();
    let mut history = vec![Observation::initial(world.clone())];
    for _ in 0..len {
        let mut actions = vec![Action::ALL[rng.gen_range(0..Action::COUNT)]];
        for (j, ty) in actual.iter_mut().enumerate() {
            let d = ty.step(&world, &inst.true_params[j]);
            actions.push(Action::ALL[d.sample(&mut rng)]);
        }
        world.apply(&actions, &mut rng).unwrap();
        history.push(Observation {
            step: world.step,
            world: world.clone(),
            prev_actions: Some(actions.iter().map(|a| a.index()).collect()),
        });
    }
    (inst, history)
}

/// One controlled agent and the given items on an open grid.
pub fn lone_agent(size: i32, agent: (i32, i32, f64), items: &[(i32, i32, f64)]) -> ForagingState {
    ForagingState {
        width: size,
        height: size,
        agents: vec![Agent {
            pos: Pos::new(agent.0, agent.1),
            level: agent.2,
            heading: Heading::N,
        }],
        items: items
            .iter()
            .map(|&(x, y, level)| Item {
                pos: Pos::new(x, y),
                level,
                collected: false,
            })
            .collect(),
        step: 0,
    }
}
