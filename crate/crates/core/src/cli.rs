//! Command-line front end.
//!
//! The run is `parse -> (mirror) -> twists -> cube -> complex -> (higher
//! maps) -> pages -> bounds -> report`. Reports are JSON documents whose
//! field names are frozen in `schema/run-report.schema.json`; they contain
//! nothing run-dependent unless `--timing` is given, so the same input
//! always produces the same bytes.
//!
//! Exit codes: 0 on success, 1 for input errors, 2 for internal consistency
//! failures (`D^2 != 0`, a non-commuting face), with a witness on stderr.
//!
//! # Higher-map files
//!
//! Whitespace-delimited records, `#` starts a comment that runs to the end
//! of the line. Each record is
//!
//! ```text
//! <r> <I> <J> <row_1> ... <row_m>
//! ```
//!
//! where `I` and `J` are cube vertices written as bitstrings (character `i`
//! is the coordinate of twist `i + 1`), `r = |J| - |I| >= 2`, `I ≤ J`
//! coordinatewise, and the `m = 2^{c(J)}` rows each hold `2^{c(I)}` bits,
//! column 0 first, in the basis order of the vertex spaces.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cube::{self, ResolutionCube, VertexId};
use crate::f2linalg::{self, F2Matrix};
use crate::invariants::{self, Shade};
use crate::specseq::{self, BoundsReport, PlacedBlock, SpectralPages};
use crate::tangle::{self, BraidWord, Letter, PlatClosure, Sign};
use crate::tqft::{self, ChainComplexF2, Generator};
use crate::Error;

pub const REPORT_SCHEMA: &str = "twistcube.run-report/1";
pub const SELFTEST_SCHEMA: &str = "twistcube.selftest-report/1";

/// Differential matrices larger than this many entries are reported by rank only.
pub const MAX_REPORTED_ENTRIES: usize = 1 << 16;

#[derive(Debug, Clone, Parser)]
#[command(name = "twistcube", version, about = "Cube-of-resolutions spectral sequences for braid words over GF(2)")]
pub struct Args {
    /// Number of braid strands (even).
    #[arg(long)]
    pub strands: Option<usize>,

    /// Braid word, e.g. "s2 s1^-1 s2".
    #[arg(long, allow_hyphen_values = true)]
    pub word: Option<String>,

    /// Plat closure: "standard" or "<cups>;<caps>" such as "1-4,2-3;1-2,3-4".
    #[arg(long, default_value = "standard")]
    pub plat: String,

    /// Use the mirror of the word.
    #[arg(long)]
    pub mirror: bool,

    /// Add two auxiliary strands closing to a split unknot.
    #[arg(long)]
    pub aux_unknot: bool,

    /// Compute every page up to the limit and include d_r matrices.
    #[arg(long)]
    pub pages: bool,

    /// Last page to compute.
    #[arg(long)]
    pub max_page: Option<usize>,

    /// File of externally supplied higher differential blocks.
    #[arg(long)]
    pub higher_maps: Option<PathBuf>,

    /// Print the JSON report instead of a text summary.
    #[arg(long)]
    pub json: bool,

    /// Seed for --selftest.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Run randomized internal consistency checks instead of a computation.
    #[arg(long)]
    pub selftest: bool,

    /// Number of random words for --selftest.
    #[arg(long, default_value_t = 50)]
    pub selftest_words: usize,

    /// Include wall-clock timings in the report (breaks byte-for-byte reproducibility).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputEcho {
    pub word: String,
    pub strands: usize,
    pub plat: String,
    pub mirror: bool,
    pub aux_unknot: bool,
    pub pages: bool,
    pub max_page: Option<usize>,
    pub higher_maps: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexReport {
    pub vertex: String,
    pub weight: i64,
    pub circles: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubeSummary {
    /// Word actually resolved (after mirroring).
    pub resolved_word: String,
    pub twists: usize,
    pub n_minus: usize,
    pub total_strands: usize,
    pub vertex_count: usize,
    pub total_generators: usize,
    pub faces_checked: usize,
    pub vertices: Vec<VertexReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeightDim {
    pub weight: i64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferentialReport {
    pub source_weight: i64,
    pub target_weight: i64,
    pub rank: usize,
    /// Rows as bitstrings, column 0 first; omitted for large blocks.
    pub matrix: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageReport {
    pub r: usize,
    pub total: usize,
    pub dims: Vec<WeightDim>,
    pub differentials: Vec<DifferentialReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterminantReport {
    /// Determinant of the link closed from the word, without auxiliary strands.
    pub value: u64,
    pub split_diagram: bool,
    pub twice_determinant: u64,
    /// `2·det`, doubled again with auxiliary strands: the E_2 total when the sequence collapses there.
    pub expected_e2_total: u64,
    pub e2_total: Option<usize>,
    pub e2_matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingReport {
    pub cube_ms: f64,
    pub complex_ms: f64,
    pub pages_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub input: InputEcho,
    pub cube: CubeSummary,
    pub e1_dims: Vec<WeightDim>,
    pub pages: Vec<PageReport>,
    pub stabilized_at: Option<usize>,
    pub bounds: BoundsReport,
    pub determinant: DeterminantReport,
    pub higher_blocks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<TimingReport>,
}

impl RunReport {
    pub fn page_total(&self, r: usize) -> Option<usize> {
        self.pages.iter().find(|p| p.r == r).map(|p| p.total)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One block from a higher-map file, before placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HigherMapRecord {
    pub r: usize,
    pub from: VertexId,
    pub to: VertexId,
    pub matrix: F2Matrix,
}

/// Renders vertex `id` of an `n`-dimensional cube; character `i` is bit `i`.
pub fn vertex_bitstring(id: VertexId, n: usize) -> String {
    (0..n).map(|i| if id & (1 << i) != 0 { '1' } else { '0' }).collect()
}

pub fn parse_vertex_bitstring(s: &str, n: usize) -> Result<VertexId, Error> {
    if s.len() != n || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Input(format!(
            "vertex {s:?} must be a bitstring of length {n}"
        )));
    }
    Ok(s.bytes()
        .enumerate()
        .filter(|&(_, b)| b == b'1')
        .fold(0, |acc, (i, _)| acc | (1 << i)))
}

/// Parses a higher-map file against the cube it refers to.
pub fn parse_higher_maps(text: &str, cube: &ResolutionCube) -> Result<Vec<HigherMapRecord>, Error> {
    let tokens: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .collect();
    let n = cube.dim();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let need = |pos: usize, what: &str| {
            tokens
                .get(pos)
                .copied()
                .ok_or_else(|| Error::Input(format!("higher-map file ends before {what} of record {}", out.len() + 1)))
        };
        let r_tok = need(pos, "the page shift")?;
        let r: usize = r_tok
            .parse()
            .map_err(|_| Error::Input(format!("bad page shift {r_tok:?} in higher-map record {}", out.len() + 1)))?;
        let from = parse_vertex_bitstring(need(pos + 1, "the source vertex")?, n)?;
        let to = parse_vertex_bitstring(need(pos + 2, "the target vertex")?, n)?;
        if from & !to != 0 {
            return Err(Error::Input(format!(
                "higher-map record {}: source {} is not below target {}",
                out.len() + 1,
                vertex_bitstring(from, n),
                vertex_bitstring(to, n)
            )));
        }
        let shift = (to.count_ones() - from.count_ones()) as usize;
        if shift != r {
            return Err(Error::Input(format!(
                "higher-map record {}: declared shift {r} but vertices differ by {shift}",
                out.len() + 1
            )));
        }
        if r < 2 {
            return Err(Error::Input(format!(
                "higher-map record {}: shift {r} is not a higher map (need r >= 2)",
                out.len() + 1
            )));
        }
        let rows = 1usize << cube.circle_count(to);
        let cols = 1usize << cube.circle_count(from);
        let mut row_tokens = Vec::with_capacity(rows);
        for k in 0..rows {
            let t = need(pos + 3 + k, "a matrix row")?;
            if t.len() != cols {
                return Err(Error::Input(format!(
                    "higher-map record {}: row {t:?} should have {cols} bits",
                    out.len() + 1
                )));
            }
            row_tokens.push(t);
        }
        let matrix = F2Matrix::from_bitstrings(cols, &row_tokens).map_err(|e| Error::Input(e.to_string()))?;
        out.push(HigherMapRecord { r, from, to, matrix });
        pos += 3 + rows;
    }
    Ok(out)
}

/// Places a record inside the weight blocks of the assembled complex.
pub fn place_record(cube: &ResolutionCube, cx: &ChainComplexF2, rec: &HigherMapRecord) -> PlacedBlock {
    PlacedBlock {
        r: rec.r,
        source_weight: cube.weight(rec.from),
        row_offset: cx.local_index(Generator { vertex: rec.to, state: 0 }),
        col_offset: cx.local_index(Generator { vertex: rec.from, state: 0 }),
        matrix: rec.matrix.clone(),
    }
}

fn weight_dims(min_weight: i64, dims: &[usize]) -> Vec<WeightDim> {
    dims.iter()
        .enumerate()
        .map(|(i, &dim)| WeightDim {
            weight: min_weight + i as i64,
            dim,
        })
        .collect()
}

fn page_reports(pages: &SpectralPages, with_matrices: bool) -> Vec<PageReport> {
    pages
        .pages
        .iter()
        .map(|p| PageReport {
            r: p.r,
            total: p.total(),
            dims: weight_dims(pages.min_weight, &p.dims),
            differentials: p
                .differentials
                .iter()
                .filter(|d| d.rank > 0)
                .map(|d| DifferentialReport {
                    source_weight: d.source_weight,
                    target_weight: d.target_weight,
                    rank: d.rank,
                    matrix: d
                        .matrix
                        .as_ref()
                        .filter(|m| with_matrices && m.rows() * m.cols() <= MAX_REPORTED_ENTRIES)
                        .map(|m| (0..m.rows()).map(|i| f2linalg::bits_to_string(m.row(i), m.cols())).collect()),
                })
                .collect(),
        })
        .collect()
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, Error> {
    v.clone().ok_or_else(|| Error::Input(format!("missing required flag --{flag}")))
}

/// Executes one run and builds its report.
pub fn run(args: &Args) -> Result<RunReport, Error> {
    let t0 = Instant::now();
    let strands = required(&args.strands, "strands")?;
    let text = required(&args.word, "word")?;
    let word = tangle::parse_braid_word(&text, strands)?;
    let plat = tangle::parse_plat(&args.plat, strands)?;
    let word = if args.mirror { tangle::mirror(&word) } else { word };

    let cube = cube::cube_for_word(&word, &plat, args.aux_unknot)?;
    let t_cube = t0.elapsed();
    let cx = tqft::assemble_complex(&cube)?;
    let t_complex = t0.elapsed();

    let mut higher_blocks = 0;
    let loaded = match &args.higher_maps {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Input(format!("cannot read higher-map file {}: {e}", path.display())))?;
            let records = parse_higher_maps(&text, &cube)?;
            let placed: Vec<PlacedBlock> = records.iter().map(|r| place_record(&cube, &cx, r)).collect();
            higher_blocks = placed.len();
            Some(specseq::load_higher_maps(cx.filtered(), &placed)?)
        }
        None => None,
    };
    let complex = loaded.as_ref().unwrap_or(cx.filtered());

    let r_max = match (args.max_page, args.pages) {
        (Some(m), _) => Some(m),
        (None, true) => None,
        (None, false) => Some(2),
    };
    let pages = specseq::compute_pages(complex, r_max)?;
    let t_pages = t0.elapsed();
    let bounds = specseq::rank_bounds(&pages);

    let det = invariants::determinant(&word, &plat)?;
    let factor = if args.aux_unknot { 4 } else { 2 };
    let e2 = pages.page(2).map(|p| p.total());
    let expected = factor * det.value;

    let n = cube.dim();
    Ok(RunReport {
        schema: REPORT_SCHEMA,
        input: InputEcho {
            word: text.split_whitespace().collect::<Vec<_>>().join(" "),
            strands,
            plat: plat.to_string(),
            mirror: args.mirror,
            aux_unknot: args.aux_unknot,
            pages: args.pages,
            max_page: args.max_page,
            higher_maps: args.higher_maps.as_ref().map(|p| p.display().to_string()),
        },
        cube: CubeSummary {
            resolved_word: word.to_string(),
            twists: n,
            n_minus: cube.twists().n_minus(),
            total_strands: cube.strands(),
            vertex_count: cube.vertex_count(),
            total_generators: cube.total_generators(),
            faces_checked: cx.faces_checked(),
            vertices: cube
                .vertices()
                .map(|(id, v)| VertexReport {
                    vertex: vertex_bitstring(id, n),
                    weight: cube.weight(id),
                    circles: v.circle_count(),
                })
                .collect(),
        },
        e1_dims: weight_dims(complex.min_weight(), complex.dims()),
        pages: page_reports(&pages, args.pages),
        stabilized_at: pages.stabilized_at,
        bounds,
        determinant: DeterminantReport {
            value: det.value,
            split_diagram: det.split_diagram,
            twice_determinant: 2 * det.value,
            expected_e2_total: expected,
            e2_total: e2,
            e2_matches: e2.map(|e| e as u64 == expected),
        },
        higher_blocks,
        timing_ms: args.timing.then(|| TimingReport {
            cube_ms: t_cube.as_secs_f64() * 1e3,
            complex_ms: (t_complex - t_cube).as_secs_f64() * 1e3,
            pages_ms: (t_pages - t_complex).as_secs_f64() * 1e3,
            total_ms: t0.elapsed().as_secs_f64() * 1e3,
        }),
    })
}

fn text_summary(r: &RunReport) -> String {
    let mut s = String::new();
    let input = &r.input;
    s += &format!(
        "word: {:?} on {} strands, plat {}{}{}\n",
        input.word,
        input.strands,
        input.plat,
        if input.mirror { ", mirrored" } else { "" },
        if input.aux_unknot { ", with auxiliary unknot" } else { "" }
    );
    s += &format!(
        "cube: {} twists (n_minus {}), {} vertices, {} generators, {} faces checked\n",
        r.cube.twists, r.cube.n_minus, r.cube.vertex_count, r.cube.total_generators, r.cube.faces_checked
    );
    for p in &r.pages {
        let dims: Vec<String> = p.dims.iter().map(|d| format!("{}:{}", d.weight, d.dim)).collect();
        s += &format!("E_{}: total {}  [{}]\n", p.r, p.total, dims.join(" "));
    }
    match r.stabilized_at {
        Some(k) => s += &format!("stabilizes at E_{k}\n"),
        None => s += "limit page not reached\n",
    }
    s += &format!("rank bounds: {}\n", r.bounds);
    let d = &r.determinant;
    s += &format!("determinant: {}{}", d.value, if d.split_diagram { " (split diagram)" } else { "" });
    if let (Some(e2), Some(m)) = (d.e2_total, d.e2_matches) {
        s += &format!(
            ", E_2 total {e2} {} {}\n",
            if m { "==" } else { "!=" },
            d.expected_e2_total
        );
    } else {
        s += "\n";
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub schema: &'static str,
    pub seed: u64,
    pub words: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

fn random_word(rng: &mut ChaCha8Rng, max_strands: usize, max_len: usize) -> BraidWord {
    let strands = 2 * rng.gen_range(1..=max_strands / 2);
    let len = if strands == 2 { rng.gen_range(0..=max_len.min(4)) } else { rng.gen_range(0..=max_len) };
    let letters = (0..len)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg };
            Letter::new(rng.gen_range(1..strands), sign)
        })
        .collect();
    BraidWord::new(strands, letters).expect("indices in range")
}

/// Randomized structural checks on seeded random words.
pub fn selftest(seed: u64, words: usize) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut checks = 0;
    for _ in 0..words {
        let w = random_word(&mut rng, 6, 6);
        let plat = PlatClosure::standard(w.strands()).expect("even strands");
        let tag = format!("[{} on {}]", w, w.strands());
        let mut check = |ok: Result<bool, Error>, what: &str| {
            checks += 1;
            match ok {
                Ok(true) => {}
                Ok(false) => failures.push(format!("{tag} {what}")),
                Err(e) => failures.push(format!("{tag} {what}: {e}")),
            }
        };
        let base = crate::e2_total(&w, &plat, false);
        check(
            base.clone().map(|_| true),
            "cube assembles, faces commute, D^2 = 0",
        );
        let Ok(base) = base else { continue };
        check(
            crate::e2_total(&tangle::mirror(&w), &plat, false).map(|m| m == base),
            "mirror preserves the E_2 total",
        );
        let at = rng.gen_range(0..=w.len());
        let k = rng.gen_range(1..w.strands().max(2));
        if w.strands() >= 2 {
            check(
                w.with_cancelling_pair(at, k)
                    .map_err(Error::from)
                    .and_then(|v| crate::e2_total(&v, &plat, false))
                    .map(|t| t == base),
                "inserting s_k s_k^-1 preserves the E_2 total",
            );
        }
        check(
            invariants::aux_doubling_check(&w, &plat).map(|a| a.passed),
            "auxiliary strands double the E_2 total",
        );
        check(
            invariants::goeritz(&w, &plat, Shade::OddGaps)
                .and_then(|a| {
                    invariants::goeritz(&w, &plat, Shade::EvenGaps)
                        .map(|b| a.split_diagram || a.determinant == b.determinant)
                }),
            "both checkerboard shadings give the same determinant on non-split diagrams",
        );
    }
    SelftestReport {
        schema: SELFTEST_SCHEMA,
        seed,
        words,
        checks,
        failures,
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.selftest {
        let rep = selftest(args.seed, args.selftest_words);
        let body = if args.json {
            serde_json::to_string_pretty(&rep).expect("report serializes")
        } else {
            let mut s = format!("selftest seed {}: {} words, {} checks, {} failures", rep.seed, rep.words, rep.checks, rep.failures.len());
            for f in &rep.failures {
                s += &format!("\n  {f}");
            }
            s
        };
        let _ = writeln!(out, "{body}");
        return if rep.failures.is_empty() { 0 } else { 2 };
    }
    match run(args) {
        Ok(report) => {
            let body = if args.json { report.to_json() } else { text_summary(&report) };
            let _ = writeln!(out, "{}", body.trim_end());
            0
        }
        Err(e) if e.is_internal() => {
            let _ = writeln!(err, "internal consistency failure: {e}");
            let witness = match &e {
                Error::SpecSeq(specseq::SpecSeqError::DSquared(w)) => serde_json::to_string(w).ok(),
                _ => None,
            };
            if let Some(w) = witness {
                let _ = writeln!(err, "witness: {w}");
            }
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(extra: &[&str]) -> Args {
        let mut v = vec!["twistcube"];
        v.extend_from_slice(extra);
        Args::try_parse_from(v).unwrap()
    }

    #[test]
    fn vertex_bitstrings() {
        assert_eq!(vertex_bitstring(0b011, 3), "110");
        assert_eq!(parse_vertex_bitstring("110", 3).unwrap(), 0b011);
        assert!(parse_vertex_bitstring("11", 3).is_err());
        assert!(parse_vertex_bitstring("1a0", 3).is_err());
    }

    #[test]
    fn unknot_run() {
        let r = run(&args(&["--strands", "2", "--word", "", "--json"])).unwrap();
        assert_eq!(r.page_total(1), Some(2));
        assert_eq!(r.page_total(2), Some(2));
        assert_eq!(r.determinant.value, 1);
    }

    #[test]
    fn missing_flags_are_input_errors() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(&args(&["--word", "s1"]), &mut out, &mut err);
        assert_eq!(code, 1);
        assert!(String::from_utf8(err).unwrap().contains("--strands"));
    }

    #[test]
    fn bad_token_named_in_error() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(&args(&["--strands", "4", "--word", "s2 t3"]), &mut out, &mut err);
        assert_eq!(code, 1);
        assert!(String::from_utf8(err).unwrap().contains("\"t3\""));
    }

    #[test]
    fn higher_map_parsing_errors() {
        let w = tangle::parse_braid_word("s2 s2", 4).unwrap();
        let c = cube::cube_for_word(&w, &PlatClosure::standard(4).unwrap(), false).unwrap();
        assert!(parse_higher_maps("", &c).unwrap().is_empty());
        assert!(parse_higher_maps("# only a comment\n", &c).unwrap().is_empty());
        // shift mismatch
        assert!(parse_higher_maps("2 00 10", &c).is_err());
        // shift 1 is not a higher map
        assert!(parse_higher_maps("1 00 10 00 00", &c).is_err());
        // source not below target
        assert!(parse_higher_maps("2 10 01", &c).is_err());
        // truncated record
        assert!(parse_higher_maps("2 00 11", &c).is_err());
    }

    #[test]
    fn selftest_small_run_is_clean() {
        let rep = selftest(1, 8);
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert!(rep.checks >= 8);
    }
}
