//! View cones: circular sectors anchored at an agent's cell centre.

use super::{ForagingState, Heading, Pos};
use crate::model::ParameterVector;

/// Sub-samples per cell side used to estimate cone/cell overlap.
pub const CELL_SAMPLES: usize = 8;
/// Minimum overlap for an entity to count as seen.
pub const MIN_CERTAINTY: f64 = 0.1;

/// Geometry of one view cone.
#[derive(Debug, Clone, Copy)]
pub struct Cone {
    apex: (f64, f64),
    dir: (f64, f64),
    radius: f64,
    /// Cosine of the half-angle; `None` for a full disc.
    cos_half: Option<f64>,
}

impl Cone {
    /// Cone for an agent at `pos` facing `heading`, with radius fraction
    /// `p_radius` of the grid diagonal and angle fraction `p_angle` of 2π.
    pub fn new(state: &ForagingState, pos: Pos, heading: Heading, p_radius: f64, p_angle: f64) -> Self {
        let half = p_angle * std::f64::consts::PI;
        Self {
            apex: (pos.x as f64 + 0.5, pos.y as f64 + 0.5),
            dir: heading.unit_vector(),
            radius: p_radius * state.diagonal(),
            cos_half: (p_angle < 1.0).then(|| half.cos()),
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.apex.0, y - self.apex.1);
        let d2 = dx * dx + dy * dy;
        if d2 > self.radius * self.radius {
            return false;
        }
        match self.cos_half {
            None => true,
            Some(c) => {
                let d = d2.sqrt();
                d == 0.0 || (dx * self.dir.0 + dy * self.dir.1) >= c * d
            }
        }
    }

    /// Fraction of the cell's sample points inside the cone.
    pub fn certainty(&self, cell: Pos) -> f64 {
        let n = CELL_SAMPLES;
        let mut hits = 0;
        for i in 0..n {
            for j in 0..n {
                let x = cell.x as f64 + (i as f64 + 0.5) / n as f64;
                let y = cell.y as f64 + (j as f64 + 0.5) / n as f64;
                if self.contains(x, y) {
                    hits += 1;
                }
            }
        }
        hits as f64 / (n * n) as f64
    }
}

/// Entities a viewer sees, by index into `agents` / `items`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Visible {
    pub agents: Vec<usize>,
    pub items: Vec<usize>,
}

/// Overlap between agent `viewer`'s cone and `cell`.
pub fn view_certainty(state: &ForagingState, viewer: usize, params: &ParameterVector, cell: Pos) -> f64 {
    let a = &state.agents[viewer];
    Cone::new(state, a.pos, a.heading, params.get(1), params.get(2)).certainty(cell)
}

/// What a cone at (`pos`, `heading`) sees; the agent standing at `pos`
/// is never reported.
pub fn visible_from(state: &ForagingState, pos: Pos, heading: Heading, p_radius: f64, p_angle: f64) -> Visible {
    let cone = Cone::new(state, pos, heading, p_radius, p_angle);
    let agents = state
        .agents
        .iter()
        .enumerate()
        .filter(|(_, a)| a.pos != pos && cone.certainty(a.pos) >= MIN_CERTAINTY)
        .map(|(i, _)| i)
        .collect();
    let items = state
        .items
        .iter()
        .enumerate()
        .filter(|(_, it)| !it.collected && it.pos != pos && cone.certainty(it.pos) >= MIN_CERTAINTY)
        .map(|(i, _)| i)
        .collect();
    Visible { agents, items }
}

/// Agents and uncollected items agent `viewer` sees with certainty ≥ 0.1.
pub fn visible_agents_and_items(state: &ForagingState, viewer: usize, params: &ParameterVector) -> Visible {
    let a = &state.agents[viewer];
    visible_from(state, a.pos, a.heading, params.get(1), params.get(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foraging::{Agent, Item, FORAGING_BOUNDS};
    use proptest::prelude::*;

    fn params(p2: f64, p3: f64) -> ParameterVector {
        ParameterVector::new(vec![0.5, p2, p3], FORAGING_BOUNDS.to_vec()).unwrap()
    }

    fn scene(heading: Heading) -> ForagingState {
        ForagingState {
            width: 10,
            height: 10,
            agents: vec![
                Agent { pos: Pos::new(0, 0), level: 0.5, heading: Heading::N },
                Agent { pos: Pos::new(5, 5), level: 0.5, heading },
                Agent { pos: Pos::new(9, 9), level: 0.5, heading: Heading::N },
            ],
            items: vec![
                Item { pos: Pos::new(5, 8), level: 0.5, collected: false },
                Item { pos: Pos::new(5, 2), level: 0.5, collected: false },
                Item { pos: Pos::new(2, 5), level: 0.5, collected: true },
            ],
            step: 0,
        }
    }

    #[test]
    fn full_cone_sees_everything() {
        let s = scene(Heading::N);
        let v = visible_agents_and_items(&s, 1, &params(1.0, 1.0));
        assert_eq!(v.agents, vec![0, 2]);
        assert_eq!(v.items, vec![0, 1]);
        for p in [Pos::new(0, 0), Pos::new(9, 9), Pos::new(5, 8), Pos::new(5, 2)] {
            assert_eq!(view_certainty(&s, 1, &params(1.0, 1.0), p), 1.0);
        }
    }

    #[test]
    fn narrow_cone_misses_what_is_behind() {
        let s = scene(Heading::N);
        let v = visible_agents_and_items(&s, 1, &params(1.0, 0.1));
        assert!(v.items.contains(&0));
        assert!(!v.items.contains(&1));
    }

    #[test]
    fn own_cell_excluded() {
        let s = scene(Heading::N);
        let v = visible_agents_and_items(&s, 1, &params(1.0, 1.0));
        assert!(!v.agents.contains(&1));
    }

    #[test]
    fn fully_contained_cell_counts_all_samples() {
        // the cell two rows ahead lies well inside a 0.5-turn cone of radius ~7
        let s = scene(Heading::N);
        let cone = Cone::new(&s, Pos::new(5, 5), Heading::N, 0.5, 0.5);
        let hits = (cone.certainty(Pos::new(5, 7)) * 64.0).round() as u32;
        assert_eq!(hits, 64);
        // half-plane boundary through the apex row: the row itself is split
        let side = cone.certainty(Pos::new(6, 5));
        assert_eq!(side, 0.5);
    }

    #[test]
    fn radius_limits_sight() {
        let s = scene(Heading::N);
        let short = visible_agents_and_items(&s, 1, &params(0.1, 1.0));
        // radius ~1.41: nothing within reach
        assert!(short.items.is_empty());
        assert!(short.agents.is_empty());
    }

    proptest! {
        #[test]
        fn visibility_monotone_in_cone_size(
            r1 in 0.1f64..1.0, dr in 0.0f64..0.9, a1 in 0.1f64..1.0, da in 0.0f64..0.9,
            h in 0usize..4,
        ) {
            let s = scene(Heading::ALL[h]);
            let small = visible_agents_and_items(&s, 1, &params(r1, a1));
            let big = visible_agents_and_items(&s, 1, &params((r1 + dr).min(1.0), (a1 + da).min(1.0)));
            for a in &small.agents { prop_assert!(big.agents.contains(a)); }
            for i in &small.items { prop_assert!(big.items.contains(i)); }
        }
    }
}
