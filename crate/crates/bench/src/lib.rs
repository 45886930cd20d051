//! Fixtures shared by the benchmarks.

use zhs_core::{KinkState, PeakonState, Train};

/// Interacting 2+2 peakon state, no crossings over `[0, 0.3]`.
pub fn two_by_two(b: u32) -> PeakonState {
    let a = if b == 1 { 4.0 } else { 8f64.sqrt() };
    PeakonState::new(
        b,
        Train::new(vec![1.0 * a, 0.6 * a], vec![-2.0, 1.0]).unwrap(),
        Train::new(vec![0.8 * a, -0.5 * a], vec![-0.5, 2.5]).unwrap(),
    )
    .unwrap()
}

/// `n` peakons per component with alternating signs.
pub fn peakon_train(b: u32, n: usize) -> PeakonState {
    let train = |shift: f64, sign: f64| {
        let amps = (0..n).map(|i| sign * (1.0 + 0.1 * i as f64)).collect();
        let pos = (0..n).map(|i| shift + 1.5 * i as f64).collect();
        Train::new(amps, pos).unwrap()
    };
    PeakonState::new(b, train(0.0, 1.0), train(0.7, -1.0)).unwrap()
}

pub fn kink_pair(b: u32) -> KinkState {
    KinkState::pair(b, 1.0, std::f64::consts::LN_2, 1.0, 0.0).unwrap()
}
