#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use oscnet::gaussian::ModePreparation;
use oscnet::network::OscillatorNetwork;

/// Random network on `n` nodes with a spanning path plus extra random edges,
/// weights in `(0, 2]`.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize) -> OscillatorNetwork {
    let mut edges = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for w in order.windows(2) {
        edges.push((w[0].min(w[1]), w[0].max(w[1])));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(0.2) {
                edges.push((a, b));
            }
        }
    }
    let weighted: Vec<_> = edges
        .into_iter()
        .map(|(a, b)| (a, b, 2.0 - rng.gen_range(0.0..2.0)))
        .collect();
    OscillatorNetwork::new((0..n).map(|k| format!("n{k}")).collect(), weighted, vec![], vec![]).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng) -> ModePreparation {
    if rng.gen_bool(0.3) {
        ModePreparation::Vacuum
    } else {
        ModePreparation::squeezed(rng.gen_range(0.0..1.5), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap()
    }
}

pub fn random_mixed(rng: &mut ChaCha8Rng) -> ModePreparation {
    if rng.gen_bool(0.25) {
        ModePreparation::thermal(rng.gen_range(0.0..2.0)).unwrap()
    } else {
        random_pure(rng)
    }
}

/// Independent matrix exponential: scaling and squaring with a Taylor series.
pub fn expm<T: nalgebra::ComplexField<RealField = f64>>(a: &nalgebra::DMatrix<T>) -> nalgebra::DMatrix<T> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.clone().modulus()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.map(|x| x * T::from_real(2f64.powi(-squarings)));
    let mut term = nalgebra::DMatrix::<T>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = (&term * &scaled).map(|x| x / T::from_real(k as f64));
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
