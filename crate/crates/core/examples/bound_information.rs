//! The four-party table with positive secrecy across every 2-vs-2 cut
//! that nevertheless admits no key: Eve's coarse-graining kills it.

use boundinfo::measures::{conditional_mutual_information, intrinsic_information_search, SearchConfig};
use boundinfo::protocols::smolin_table;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = smolin_table();
    println!("{}", t.to_text());
    for (x, y) in [(["A", "C"], ["B", "D"]), (["A", "B"], ["C", "D"]), (["A", "D"], ["B", "C"])] {
        let cmi = conditional_mutual_information(&t, &x, &y, &["Eve"])?;
        let r = intrinsic_information_search(&t, &x, &y, &["Eve"], &SearchConfig::default())?;
        println!(
            "{}{}:{}{}  I(X:Y|Eve) = {:.6}  intrinsic upper bound = {} (exact zero: {}, {} maps tried)",
            x[0], x[1], y[0], y[1], cmi.value, r.value.value, r.value.exact, r.evaluations
        );
        println!("  witness map: {:?}", r.witness.as_map());
    }
    Ok(())
}
