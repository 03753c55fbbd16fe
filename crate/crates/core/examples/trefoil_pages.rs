//! Every page of the spectral sequence for the trefoil plat, per weight.
//!
//! ```text
//! cargo run --example trefoil_pages -- "s2 s2 s2" 4
//! ```

use twistcube::specseq;
use twistcube::tangle::{self, PlatClosure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "s2 s2 s2".into());
    let strands: usize = args.next().map_or(Ok(4), |s| s.parse())?;

    let word = tangle::parse_braid_word(&text, strands)?;
    let plat = PlatClosure::standard(strands)?;
    let pages = twistcube::pages_for_word(&word, &plat, false, None)?;

    println!("{word} on {strands} strands");
    let weights: Vec<String> = pages.weights().map(|w| format!("{w:>4}")).collect();
    println!("weight {}", weights.join(""));
    for p in &pages.pages {
        let dims: Vec<String> = p.dims.iter().map(|d| format!("{d:>4}")).collect();
        println!("E_{:<4} {}   total {}", p.r, dims.join(""), p.total());
    }
    match pages.stabilized_at {
        Some(r) => println!("stable from E_{r}"),
        None => println!("not stable yet"),
    }
    println!("{}", specseq::rank_bounds(&pages));
    Ok(())
}
