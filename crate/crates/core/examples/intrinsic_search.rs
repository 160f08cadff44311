//! Exhaustive and refined searches for Eve's best processing on a random
//! distribution.

use boundinfo::cli::random_distribution;
use boundinfo::measures::{conditional_mutual_information, intrinsic_information_search, SearchConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_distribution(&mut rng);
    println!("{}", d.to_text());
    let cmi = conditional_mutual_information(&d, &["X"], &["Y"], &["Z"])?;
    let det = intrinsic_information_search(&d, &["X"], &["Y"], &["Z"], &SearchConfig::default())?;
    let refined = intrinsic_information_search(&d, &["X"], &["Y"], &["Z"], &SearchConfig { seed, ..SearchConfig::refined() })?;
    println!("I(X:Y|Z)            = {:.9}", cmi.value);
    println!("best deterministic  = {:.9} ({} maps)", det.value.value, det.evaluations);
    println!("refined             = {:.9} ({} evaluations)", refined.value.value, refined.evaluations);
    Ok(())
}
