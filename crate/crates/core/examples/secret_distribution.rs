//! Three holders of a secret hand it to a fourth party using one copy of
//! bound information, and pairwise keys chain into a multipartite key.

use boundinfo::protocols::verify::secret_distribution_checks;
use boundinfo::protocols::{distribute_secret, multipartite_from_pairwise, smolin_table, PairSbit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (fin, t) = distribute_secret(&smolin_table(), &["A", "B", "C"], "D")?;
    for c in secret_distribution_checks(&t)? {
        println!("{} {}", c.name, if c.pass { "PASS" } else { "FAIL" });
    }
    println!("\nEve sees {:?}", fin.eve_view());

    let pairs = [PairSbit::fresh("A", "B")?, PairSbit::fresh("B", "C")?, PairSbit::fresh("C", "D")?];
    let (key, _) = multipartite_from_pairwise(&pairs)?;
    let outs = ["K_A", "K_B", "K_C", "K_D"];
    println!("chained key is a multipartite sbit: {}", key.is_multipartite_sbit(&outs));
    Ok(())
}
