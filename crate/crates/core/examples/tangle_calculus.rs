//! Flat tangles: compose identities and cup-caps, close them with a plat,
//! and count circles.

use twistcube::tangle::{self, ElementaryKind, PlatClosure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plat = PlatClosure::standard(4)?;
    println!("cups {:?}, caps {:?}", plat.cup_pairs(), plat.cap_pairs());

    let id = tangle::elementary_tangle(ElementaryKind::Identity, 4)?;
    let closed = tangle::close_plat(&id, &plat)?;
    println!("identity on 4 strands closes to {} circles", closed.circles());

    for k in 1..=3 {
        let e = tangle::elementary_tangle(ElementaryKind::CupCap(k), 4)?;
        let twice = tangle::compose(&e, &e)?;
        println!(
            "cupcap({k}): closes to {}, composed with itself has {} closed circle(s) and closes to {}",
            tangle::close_plat(&e, &plat)?.circles(),
            twice.circles(),
            tangle::close_plat(&twice, &plat)?.circles()
        );
    }

    let word = tangle::parse_braid_word("s2 s1^-1 s3", 4)?;
    println!("{word} mirrors to {}", tangle::mirror(&word));
    println!("with a cancelling pair: {}", word.with_cancelling_pair(1, 2)?);
    let nonstandard = tangle::parse_plat("1-4,2-3;1-2,3-4", 4)?;
    println!("nested cups are standard? {}", nonstandard.is_standard());
    Ok(())
}
