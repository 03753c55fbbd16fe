//! Cross-checks the E_2 total against the Goeritz determinant and the
//! auxiliary-strand doubling for a few small links.

use twistcube::invariants::{self, Shade};
use twistcube::tangle::{self, PlatClosure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let links = [
        ("unknot", "", 2),
        ("Hopf link", "s2 s2", 4),
        ("trefoil", "s2 s2 s2", 4),
        ("figure-eight", "s2 s2 s1^-1 s2", 4),
        ("5_1", "s2 s2 s2 s2 s2", 4),
        ("two-component unlink", "", 4),
    ];
    println!("{:<22}{:>6}{:>6}{:>10}", "link", "E_2", "det", "aux x2");
    for (name, text, strands) in links {
        let word = tangle::parse_braid_word(text, strands)?;
        let plat = PlatClosure::standard(strands)?;
        let e2 = twistcube::e2_total(&word, &plat, false)?;
        let det = invariants::determinant(&word, &plat)?;
        let aux = invariants::aux_doubling_check(&word, &plat)?;
        let shown = if det.split_diagram { "split".to_string() } else { det.value.to_string() };
        println!("{name:<22}{e2:>6}{shown:>6}{:>10}", aux.passed);
    }

    let word = tangle::parse_braid_word("s2 s2 s2", 4)?;
    let g = invariants::goeritz(&word, &PlatClosure::standard(4)?, Shade::EvenGaps)?;
    println!("trefoil Goeritz matrix, even shading: {:?}", g.matrix);
    Ok(())
}
