//! Higher differentials. A three-generator filtered complex whose only
//! arrow jumps two weights, then a higher-map file loaded onto the trefoil
//! cube; all-ones breaks `D^2 = 0` and is rejected.

use twistcube::cli;
use twistcube::cube::cube_for_word;
use twistcube::f2linalg::F2Matrix;
use twistcube::specseq::{self, FilteredComplex};
use twistcube::tangle::{self, PlatClosure};
use twistcube::tqft;

fn show(pages: &specseq::SpectralPages) {
    for p in &pages.pages {
        let ranks: Vec<String> = p.differentials.iter().map(|d| format!("{}->{}: {}", d.source_weight, d.target_weight, d.rank)).collect();
        println!("  E_{} {:?}  d ranks [{}]", p.r, p.dims, ranks.join(", "));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // x (weight 0) -> z (weight 2), y (weight 1) isolated
    let d = F2Matrix::from_bitstrings(3, &["000", "000", "100"])?;
    let (fc, _) = FilteredComplex::from_total(&[0, 1, 2], &d)?;
    println!("x -> z across two weights:");
    show(&specseq::compute_pages(&fc, None)?);

    let word = tangle::parse_braid_word("s2 s2 s2", 4)?;
    let c = cube_for_word(&word, &PlatClosure::standard(4)?, false)?;
    let cx = tqft::assemble_complex(&c)?;
    for (name, file) in [
        ("zero block", "# from 000 to 110\n2 000 110\n0000\n0000\n0000\n0000\n"),
        ("all ones", "2 000 110\n1111\n1111\n1111\n1111\n"),
    ] {
        let records = cli::parse_higher_maps(file, &c)?;
        let placed: Vec<_> = records.iter().map(|r| cli::place_record(&c, &cx, r)).collect();
        match specseq::load_higher_maps(cx.filtered(), &placed) {
            Ok(aug) => {
                println!("trefoil with {name}:");
                show(&specseq::compute_pages(&aug, None)?);
            }
            Err(e) => println!("trefoil with {name}: rejected, {e}"),
        }
    }
    Ok(())
}
