#![allow(dead_code)]

use nonlocal_core::chsh::tsirelson_settings;
use nonlocal_core::lhv::local_vertices;
use nonlocal_core::qudit::max_entangled;
use nonlocal_core::sequential::SequentialJointDistribution;
use nonlocal_core::BehaviorTable;
use rand::Rng;

pub fn bell_table() -> BehaviorTable {
    BehaviorTable::from_state(
        &max_entangled(2).unwrap().to_density(),
        &tsirelson_settings(),
    )
    .unwrap()
}

/// Relabels settings and outcomes: `swap_*` exchanges a party's settings,
/// `flip_*[s]` exchanges the outcomes of setting `s`.
pub fn relabel(
    t: &BehaviorTable,
    swap_a: bool,
    swap_b: bool,
    flip_a: [bool; 2],
    flip_b: [bool; 2],
) -> BehaviorTable {
    let mut p = [0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let nx = x ^ swap_a as usize;
                    let ny = y ^ swap_b as usize;
                    let na = a ^ flip_a[x] as usize;
                    let nb = b ^ flip_b[y] as usize;
                    p[BehaviorTable::index(nx, ny, na, nb)] = t.get(x, y, a, b);
                }
            }
        }
    }
    BehaviorTable::from_array(p)
}

/// Random normalized weights on a random subset of `k` items.
pub fn random_weights(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                rng.gen::<f64>()
            } else {
                0.0
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.gen_range(0..k)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// A no-signaling table: local vertices mixed with a relabeled Tsirelson table.
pub fn random_no_signaling_table(rng: &mut impl Rng) -> BehaviorTable {
    let vertices = local_vertices();
    let w = random_weights(rng, 16);
    let local = BehaviorTable::mixture(w.iter().copied().zip(vertices.iter()));
    let quantum = relabel(
        &bell_table(),
        rng.gen(),
        rng.gen(),
        [rng.gen(), rng.gen()],
        [rng.gen(), rng.gen()],
    );
    let q: f64 = rng.gen();
    BehaviorTable::mixture([(q, &quantum), (1.0 - q, &local)])
}

/// One side of a deterministic two-stage strategy: a fixed first-stage outcome
/// and a second-stage outcome per setting.
#[derive(Debug, Clone, Copy)]
pub struct SideStrategy {
    pub first: usize,
    pub second: [usize; 2],
}

impl SideStrategy {
    pub fn all() -> Vec<SideStrategy> {
        (0..8)
            .map(|k| SideStrategy {
                first: k >> 2,
                second: [(k >> 1) & 1, k & 1],
            })
            .collect()
    }
}

/// Joint distribution of a synthetic local world: a random mixture of pairs of
/// deterministic two-stage strategies.
pub fn random_sequential_lhv_world(rng: &mut impl Rng) -> SequentialJointDistribution {
    let sides = SideStrategy::all();
    let pairs: Vec<(SideStrategy, SideStrategy)> = sides
        .iter()
        .flat_map(|&a| sides.iter().map(move |&b| (a, b)))
        .collect();
    let w = random_weights(rng, pairs.len());
    let mut probs = [0.0; 64];
    for ((alice, bob), weight) in pairs.iter().zip(&w) {
        for x in 0..2 {
            for y in 0..2 {
                let idx = ((((x * 2 + y) * 2 + alice.first) * 2 + bob.first) * 2 + alice.second[x])
                    * 2
                    + bob.second[y];
                probs[idx] += weight;
            }
        }
    }
    SequentialJointDistribution::from_probabilities(probs).unwrap()
}
