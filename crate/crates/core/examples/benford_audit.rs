//! First-digit test on a log-uniform series and on a fabricated one.
use mailsleuth::benford::conformity;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let natural: Vec<f64> = (0..5000).map(|_| 10f64.powf(rng.gen_range(0.0..5.0))).collect();
    let invented: Vec<f64> = (0..5000).map(|_| f64::from(rng.gen_range(100..1000u32))).collect();
    for (name, values) in [("log-uniform", natural), ("uniform 100..999", invented)] {
        let c = conformity(&values);
        println!("{name:<18} MAD {:.4} chi2 {:8.1} -> {}", c.mad, c.chi_square, c.verdict);
    }
}
