//! A* on the 4-connected grid with a Manhattan heuristic.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Action, ForagingState, Heading, Pos};

/// Shortest path from `from` to `to` as a list of moves. Cells for which
/// `blocked` is true cannot be entered, except `to` itself. Neighbours are
/// expanded in N, E, S, W order and the frontier breaks `f` ties by lower
/// `h`, then by insertion order, so the result is deterministic.
pub fn astar_grid(
    width: i32,
    height: i32,
    blocked: impl Fn(Pos) -> bool,
    from: Pos,
    to: Pos,
) -> Option<Vec<Action>> {
    let in_grid = |p: Pos| p.x >= 0 && p.y >= 0 && p.x < width && p.y < height;
    if !in_grid(from) || !in_grid(to) {
        return None;
    }
    if from == to {
        return Some(Vec::new());
    }
    let idx = |p: Pos| (p.y * width + p.x) as usize;
    let n = (width * height) as usize;
    let mut g = vec![i32::MAX; n];
    let mut parent: Vec<Option<(Pos, Heading)>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    let mut seq = 0u32;
    g[idx(from)] = 0;
    open.push(Reverse((from.manhattan(to), from.manhattan(to), seq, from.x, from.y)));
    while let Some(Reverse((_, _, _, x, y))) = open.pop() {
        let cur = Pos::new(x, y);
        if closed[idx(cur)] {
            continue;
        }
        closed[idx(cur)] = true;
        if cur == to {
            let mut path = Vec::new();
            let mut p = cur;
            while let Some((prev, dir)) = parent[idx(p)] {
                path.push(Action::from_heading(dir));
                p = prev;
            }
            path.reverse();
            return Some(path);
        }
        for dir in Heading::ALL {
            let nb = cur.offset(dir);
            if !in_grid(nb) || closed[idx(nb)] || (nb != to && blocked(nb)) {
                continue;
            }
            let cost = g[idx(cur)] + 1;
            if cost < g[idx(nb)] {
                g[idx(nb)] = cost;
                parent[idx(nb)] = Some((cur, dir));
                seq += 1;
                let h = nb.manhattan(to);
                open.push(Reverse((cost + h, h, seq, nb.x, nb.y)));
            }
        }
    }
    None
}

/// Path for agent at `from` in `state`: other agents and uncollected items
/// are obstacles, the destination cell is not.
pub fn astar_path(state: &ForagingState, from: Pos, to: Pos) -> Option<Vec<Action>> {
    astar_grid(
        state.width,
        state.height,
        |p| p != from && (state.agent_at(p).is_some() || state.item_at(p).is_some()),
        from,
        to,
    )
}

/// First move towards `to`. When no path exists, the legal move that ends
/// closest (Euclidean) to `to`; with no legal move, the closest in-grid move.
pub fn first_move(state: &ForagingState, from: Pos, to: Pos) -> Action {
    if let Some(first) = astar_path(state, from, to).and_then(|p| p.first().copied()) {
        return first;
    }
    let closest = |legal_only: bool| {
        Heading::ALL
            .iter()
            .map(|&h| (h, from.offset(h)))
            .filter(|&(_, p)| state.in_grid(p) && (!legal_only || state.is_free(p)))
            .min_by(|a, b| a.1.euclidean(to).total_cmp(&b.1.euclidean(to)))
            .map(|(h, _)| Action::from_heading(h))
    };
    closest(true).or_else(|| closest(false)).unwrap_or(Action::N)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foraging::{Agent, Item};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    fn open_world(w: i32, h: i32) -> ForagingState {
        ForagingState {
            width: w,
            height: h,
            agents: vec![],
            items: vec![],
            step: 0,
        }
    }

    fn bfs(w: i32, h: i32, blocked: &[bool], from: Pos, to: Pos) -> Option<usize> {
        let idx = |p: Pos| (p.y * w + p.x) as usize;
        let mut dist = vec![usize::MAX; (w * h) as usize];
        let mut q = VecDeque::new();
        dist[idx(from)] = 0;
        q.push_back(from);
        while let Some(c) = q.pop_front() {
            if c == to {
                return Some(dist[idx(c)]);
            }
            for (dx, dy) in [(0, 1), (1, 0), (0, -1), (-1, 0)] {
                let n = Pos::new(c.x + dx, c.y + dy);
                if n.x < 0 || n.y < 0 || n.x >= w || n.y >= h {
                    continue;
                }
                if (n != to && blocked[idx(n)]) || dist[idx(n)] != usize::MAX {
                    continue;
                }
                dist[idx(n)] = dist[idx(c)] + 1;
                q.push_back(n);
            }
        }
        None
    }

    fn walk(from: Pos, path: &[Action]) -> Pos {
        path.iter()
            .fold(from, |p, a| p.offset(a.direction().unwrap()))
    }

    #[test]
    fn open_grid_manhattan() {
        let w = open_world(5, 5);
        let p = astar_path(&w, Pos::new(0, 0), Pos::new(3, 0)).unwrap();
        assert_eq!(p, vec![Action::E; 3]);
    }

    #[test]
    fn matches_bfs_on_random_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let (w, h) = (rng.gen_range(3..16), rng.gen_range(3..16));
            let blocked: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.3)).collect();
            let from = Pos::new(rng.gen_range(0..w), rng.gen_range(0..h));
            let to = Pos::new(rng.gen_range(0..w), rng.gen_range(0..h));
            let got = astar_grid(w, h, |p| blocked[(p.y * w + p.x) as usize], from, to);
            let want = bfs(w, h, &blocked, from, to);
            assert_eq!(got.as_ref().map(|p| p.len()), want);
            if let Some(path) = got {
                assert_eq!(walk(from, &path), to);
                let mut p = from;
                for a in &path[..path.len().saturating_sub(1)] {
                    p = p.offset(a.direction().unwrap());
                    assert!(!blocked[(p.y * w + p.x) as usize]);
                }
            }
        }
    }

    #[test]
    fn ties_prefer_north_then_east() {
        let w = open_world(5, 5);
        let p = astar_path(&w, Pos::new(0, 0), Pos::new(2, 2)).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p[0], Action::N);
    }

    #[test]
    fn walled_off_destination_falls_back() {
        let mut w = open_world(5, 5);
        // enclose (4, 4) with items at (3, 4) and (4, 3)
        for (x, y) in [(3, 4), (4, 3)] {
            w.items.push(Item { pos: Pos::new(x, y), level: 0.5, collected: false });
        }
        w.agents.push(Agent { pos: Pos::new(1, 4), level: 0.5, heading: Heading::N });
        assert!(astar_path(&w, Pos::new(1, 4), Pos::new(4, 4)).is_none());
        assert_eq!(first_move(&w, Pos::new(1, 4), Pos::new(4, 4)), Action::E);
    }

    #[test]
    fn destination_may_be_occupied() {
        let mut w = open_world(5, 1);
        w.agents.push(Agent { pos: Pos::new(0, 0), level: 0.5, heading: Heading::N });
        w.agents.push(Agent { pos: Pos::new(3, 0), level: 0.5, heading: Heading::N });
        let p = astar_path(&w, Pos::new(0, 0), Pos::new(3, 0)).unwrap();
        assert_eq!(p.len(), 3);
    }
}
