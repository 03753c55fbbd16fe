//! The cube of resolutions for a word: vertices, circle counts, and the
//! merge/split maps on each edge as GF(2) matrices.

use twistcube::cube::{self, Cobordism};
use twistcube::tangle::{self, PlatClosure};
use twistcube::tqft::{self, VertexSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let word = tangle::parse_braid_word("s2 s2", 4)?;
    let c = cube::cube_for_word(&word, &PlatClosure::standard(4)?, false)?;
    println!("{c}");
    for (id, v) in c.vertices() {
        println!("  vertex {id:0w$b}: weight {}, {} circle(s)", c.weight(id), v.circle_count(), w = c.dim());
    }
    for (from, to) in c.edges() {
        let e = c.adjacent_cobordism(from, to)?;
        let kind = match e.kind {
            Cobordism::Merge { .. } => "merge",
            Cobordism::Split { .. } => "split",
        };
        let m = tqft::edge_map_matrix(&c, from, to)?;
        println!("edge {from:02b} -> {to:02b}, twist {}: {kind}, {}x{} matrix", e.twist, m.rows(), m.cols());
        let source = VertexSpace::new(c.vertex(from).circles());
        let target = VertexSpace::new(c.vertex(to).circles());
        let map = tqft::edge_map(&c, from, to)?;
        for s in 0..source.dim() {
            let image: Vec<String> = map.image(s).iter().map(|&t| target.describe(t)).collect();
            let image = if image.is_empty() { "0".to_string() } else { image.join(" + ") };
            println!("  {} -> {image}", source.describe(s));
        }
    }
    let cx = tqft::assemble_complex(&c)?;
    println!("complex of dimension {}, {} faces commute", cx.total_dim(), cx.faces_checked());
    Ok(())
}
