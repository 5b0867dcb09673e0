use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::state::{Counts, Ctx};
use crate::instance::{KeyAssignment, KmpInstance};

const MAX_SWAP_PASSES: usize = 25;

/// Constructive pass plus 1-swap local search. Always returns a feasible
/// assignment.
///
/// Edges are visited by decreasing endpoint degree sum. An edge short of q
/// shared keys receives the least-used keys both endpoints can still take;
/// if it cannot reach q the partial additions are undone. The local search
/// then tries, per vertex, to add a key or replace one key of its ring by
/// another, accepting strict improvements of the secure-edge count. `seed`
/// shuffles the key order used to break usage ties.
pub fn greedy_heuristic(inst: &KmpInstance, seed: u64) -> KeyAssignment {
    let ctx = Ctx::new(inst);
    let mut counts = Counts::new(&ctx);
    let g = inst.graph();

    let mut rank: Vec<usize> = (0..ctx.kc).collect();
    rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut tie = vec![0; ctx.kc];
    for (pos, &k) in rank.iter().enumerate() {
        tie[k] = pos;
    }

    let mut edges = g.edges().to_vec();
    edges.sort_by_key(|&(i, j)| (std::cmp::Reverse(g.degree(i) + g.degree(j)), i, j));

    for &(i, j) in &edges {
        let shared = counts.shared(&ctx, i, j);
        if shared >= ctx.q {
            continue;
        }
        let mut keys: Vec<usize> = (0..ctx.kc)
            .filter(|&k| !(counts.has(&ctx, i, k) && counts.has(&ctx, j, k)))
            .collect();
        keys.sort_by_key(|&k| (counts.usage[k], tie[k]));

        let mut added: Vec<(usize, usize)> = Vec::new();
        let mut gained = 0;
        for k in keys {
            if shared + gained == ctx.q {
                break;
            }
            let mark = added.len();
            let mut ok = true;
            for v in [i, j] {
                if counts.has(&ctx, v, k) {
                    continue;
                }
                if counts.can_add(&ctx, v, k) {
                    counts.add(&ctx, v, k);
                    added.push((v, k));
                } else {
                    ok = false;
                    break;
                }
            }
            if ok {
                gained += 1;
            } else {
                for (v, k) in added.drain(mark..).rev() {
                    counts.remove(&ctx, v, k);
                }
            }
        }
        if shared + gained < ctx.q {
            for (v, k) in added.into_iter().rev() {
                counts.remove(&ctx, v, k);
            }
        }
    }

    local_search(&ctx, &mut counts);
    counts.to_assignment(&ctx)
}

fn local_search(ctx: &Ctx, counts: &mut Counts) {
    let g = ctx.inst.graph();
    let mut order: Vec<usize> = (0..ctx.n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(g.degree(i)), i));

    for _ in 0..MAX_SWAP_PASSES {
        let mut improved = false;
        for &i in &order {
            let ring: Vec<usize> = (0..ctx.kc).filter(|&k| counts.has(ctx, i, k)).collect();
            let outs = std::iter::once(None).chain(ring.into_iter().map(Some));
            'moves: for out in outs {
                let before = counts.secure_around(ctx, i);
                if let Some(k) = out {
                    counts.remove(ctx, i, k);
                }
                for k_in in 0..ctx.kc {
                    if Some(k_in) == out || !counts.can_add(ctx, i, k_in) {
                        continue;
                    }
                    counts.add(ctx, i, k_in);
                    if counts.secure_around(ctx, i) > before {
                        improved = true;
                        break 'moves;
                    }
                    counts.remove(ctx, i, k_in);
                }
                if let Some(k) = out {
                    counts.add(ctx, i, k);
                }
            }
        }
        if !improved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er, Graph};
    use crate::instance::evaluate;

    #[test]
    fn triangle_reaches_optimum() {
        let inst = KmpInstance::uniform(Graph::complete(3), 1, 1, 1.0, 1, 1, 1, 3).unwrap();
        let a = greedy_heuristic(&inst, 0);
        let r = evaluate(&inst, &a).unwrap();
        assert!(r.feasible);
        assert_eq!(r.objective, 3);
    }

    #[test]
    fn path_is_feasible_and_nontrivial() {
        let inst = KmpInstance::uniform(Graph::path(3), 2, 1, 1.0, 1, 1, 1, 3).unwrap();
        let r = evaluate(&inst, &greedy_heuristic(&inst, 5)).unwrap();
        assert!(r.feasible);
        assert!((1..=2).contains(&r.objective));
    }

    #[test]
    fn no_capacity_means_no_keys() {
        // every key costs more than any vertex can hold
        let inst = KmpInstance::uniform(Graph::path(4), 3, 1, 1.0, 1, 2, 1, 4).unwrap();
        let a = greedy_heuristic(&inst, 1);
        assert_eq!(a, KeyAssignment::empty(4, 3));
    }

    #[test]
    fn feasible_on_generated_instances() {
        for seed in 0..30 {
            let g = generate_er(12, 0.3, seed).unwrap();
            let inst = KmpInstance::uniform(g, 8, 1 + (seed % 2) as u32, 0.3, 1, 1, 4, 3).unwrap();
            let a = greedy_heuristic(&inst, seed);
            assert!(evaluate(&inst, &a).unwrap().feasible, "seed {seed}");
            assert_eq!(a, greedy_heuristic(&inst, seed));
        }
    }
}
