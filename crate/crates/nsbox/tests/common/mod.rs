//! Random classical-quantum states whose boxes land on the snapping lattice.

use nsbox::quantum::{qubit_state, MeasurementSettings, Qubit, SnapOptions};
use rand::seq::SliceRandom;
use rand::Rng;

/// Bob's and Charlie's entries have denominator at most 32 and the mixing
/// weight 16, so every box entry lies on the lattice with denominator 512.
pub const CQ_SNAP: SnapOptions = SnapOptions { denominator: 1024, tolerance: 1e-9 };

pub struct CqInstance {
    pub p: [f64; 2],
    pub bob: Vec<Qubit>,
    pub charlie: Vec<Qubit>,
    pub settings: MeasurementSettings,
}

fn bloch(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let r: [f64; 3] = std::array::from_fn(|_| f64::from(rng.gen_range(-2i32..=2)) / 2.0);
        if r.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            return r;
        }
    }
}

fn direction(rng: &mut impl Rng) -> [f64; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let choices = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [h, h, 0.0],
        [h, -h, 0.0],
        [-h, h, 0.0],
        [-h, -h, 0.0],
    ];
    *choices.choose(rng).expect("nonempty")
}

/// Alice measures σz or −σz, so her responses are deterministic.
pub fn random_cq(rng: &mut impl Rng) -> CqInstance {
    let k = f64::from(rng.gen_range(1..16));
    let z = |s: f64| [0.0, 0.0, s];
    let alice = [z(1.0), z(if rng.gen() { 1.0 } else { -1.0 })];
    let settings = MeasurementSettings::new([alice, [direction(rng), direction(rng)], [direction(rng), direction(rng)]])
        .expect("unit vectors");
    let mut states = || (0..2).map(|_| qubit_state(bloch(rng)).expect("inside the ball")).collect::<Vec<_>>();
    let bob = states();
    let charlie = states();
    CqInstance { p: [k / 16.0, 1.0 - k / 16.0], bob, charlie, settings }
}
