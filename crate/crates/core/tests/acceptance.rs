//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistcube::cli::{self, Args, RunReport};
use twistcube::cube::{cube_for_word, Cobordism};
use twistcube::f2linalg::F2Matrix;
use twistcube::invariants;
use twistcube::specseq::{self, DSquaredCheck, PlacedBlock};
use twistcube::tangle::{self, BraidWord, PlatClosure};
use twistcube::{e2_total, tqft};

use clap::Parser;

type Outcome = Result<String, String>;

fn run(args: &[&str]) -> Result<RunReport, String> {
    let mut v = vec!["twistcube"];
    v.extend_from_slice(args);
    let args = Args::try_parse_from(v).map_err(|e| e.to_string())?;
    cli::run(&args).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn std_plat(w: &BraidWord) -> PlatClosure {
    PlatClosure::standard(w.strands()).unwrap()
}

fn golden(word: &str, strands: usize, e2: usize, det: u64) -> Result<String, String> {
    let r = run(&["--strands", &strands.to_string(), "--word", word])?;
    let got = r.page_total(2).ok_or("no E_2 page")?;
    ensure(got == e2, || format!("{word:?}: E_2 total {got}, expected {e2}"))?;
    ensure(r.determinant.value == det, || format!("{word:?}: det {}, expected {det}", r.determinant.value))?;
    ensure(r.determinant.e2_matches == Some(true), || format!("{word:?}: E_2 != 2 det"))?;
    let w = tangle::parse_braid_word(word, strands).unwrap();
    let oracle = common::oracle_homology_total(&w);
    ensure(oracle == e2, || format!("{word:?}: brute-force cube gives {oracle}"))?;
    Ok(format!("{word:?} E_2 {got} = 2*{det}"))
}

fn criterion_1() -> Outcome {
    let r = run(&["--strands", "2", "--word", ""])?;
    let (e1, e2) = (r.page_total(1), r.page_total(2));
    ensure(e1 == Some(2) && e2 == Some(2), || format!("E_1 {e1:?}, E_2 {e2:?}"))?;
    ensure(r.determinant.value == 1, || format!("det {}", r.determinant.value))?;
    Ok("E_1 2, E_2 2, det 1".into())
}

fn criterion_2() -> Outcome {
    let plain = golden("s2 s2 s2", 4, 6, 3)?;
    let aux = run(&["--strands", "4", "--word", "s2 s2 s2", "--aux-unknot"])?;
    ensure(aux.page_total(2) == Some(12), || format!("with aux: {:?}", aux.page_total(2)))?;
    Ok(format!("{plain}; with aux 12"))
}

fn criterion_3() -> Outcome {
    let mut parts = Vec::new();
    for (word, e2, det) in [("s2 s2 s1^-1 s2", 10, 5), ("s2 s2", 4, 2)] {
        let t = Instant::now();
        parts.push(golden(word, 4, e2, det)?);
        ensure(t.elapsed() < Duration::from_secs(1), || format!("{word:?} took {:?}", t.elapsed()))?;
    }
    Ok(parts.join("; "))
}

fn criterion_4() -> Outcome {
    let mut words: Vec<BraidWord> = [
        ("s2 s2 s2", 4),
        ("s2 s2 s1^-1 s2", 4),
        ("s2 s2 s2 s2 s2", 4),
        ("s2 s1^-1 s1^-1 s2 s2", 4),
        ("s2 s3^-1 s4 s1^-1 s2 s3^-1 s4 s5^-1 s4 s3^-1 s2 s4", 6),
        ("s2 s1^-1 s2 s2 s1^-1 s1^-1 s2 s1^-1 s2 s2 s1^-1 s2", 4),
    ]
    .iter()
    .map(|&(w, n)| tangle::parse_braid_word(w, n).unwrap())
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut twelve = 0;
    while words.len() < 36 {
        let strands = 2 * rng.gen_range(2..=4);
        let len = if twelve < 6 { 12 } else { rng.gen_range(3..=12) };
        let w = common::random_alternating_word(&mut rng, strands, len);
        if invariants::determinant(&w, &std_plat(&w)).unwrap().split_diagram {
            continue;
        }
        twelve += (len == 12) as usize;
        words.push(w);
    }
    for w in &words {
        let det = invariants::determinant(w, &std_plat(w)).map_err(|e| e.to_string())?;
        let e2 = e2_total(w, &std_plat(w), false).map_err(|e| e.to_string())?;
        ensure(e2 as u64 == 2 * det.value, || format!("{w} on {}: E_2 {e2}, det {}", w.strands(), det.value))?;
    }
    Ok(format!("{} alternating words, {} with 12 crossings", words.len(), twelve + 2))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut edges, mut faces) = (0usize, 0usize);
    for _ in 0..200 {
        let strands = 2 * rng.gen_range(1..=4);
        let len = rng.gen_range(0..=10);
        let w = common::random_word(&mut rng, strands, len);
        let plat = std_plat(&w);
        let c = cube_for_word(&w, &plat, false).map_err(|e| e.to_string())?;
        for (from, to) in c.edges() {
            let (a, b) = (c.circle_count(from), c.circle_count(to));
            ensure(a.abs_diff(b) == 1, || format!("{w}: edge {from:b}->{to:b} has {a} -> {b} circles"))?;
            let kind = c.adjacent_cobordism(from, to).map_err(|e| e.to_string())?.kind;
            ensure(matches!(kind, Cobordism::Merge { .. }) == (a > b), || format!("{w}: wrong cobordism type"))?;
            edges += 1;
        }
        // assembly checks every 2-face and fails on the first one that does not commute
        let cx = tqft::assemble_complex(&c).map_err(|e| format!("{w}: {e}"))?;
        faces += cx.faces_checked();
        ensure(specseq::verify_d_squared(cx.filtered()) == DSquaredCheck::Pass, || format!("{w}: d_1^2 != 0"))?;
        let pages = specseq::compute_pages(cx.filtered(), Some(2)).map_err(|e| e.to_string())?;
        let base = pages.page(2).unwrap().total();
        let m = e2_total(&tangle::mirror(&w), &plat, false).map_err(|e| e.to_string())?;
        ensure(m == base, || format!("{w}: mirror gives {m}, word gives {base}"))?;
        let at = rng.gen_range(0..=w.len());
        let k = rng.gen_range(1..strands);
        let v = w.with_cancelling_pair(at, k).unwrap();
        let t = e2_total(&v, &plat, false).map_err(|e| e.to_string())?;
        ensure(t == base, || format!("{w} -> {v}: E_2 {t} vs {base}"))?;
    }
    Ok(format!("200 words, {edges} edges, {faces} faces"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut killing, mut conjugated) = (0, 0);
    for i in 0..100 {
        let strands = if rng.gen_bool(0.5) { 4 } else { 6 };
        let len = rng.gen_range(3..=6);
        let w = common::random_word(&mut rng, strands, len);
        let c = cube_for_word(&w, &std_plat(&w), false).map_err(|e| e.to_string())?;
        let n = c.dim();
        let cx = tqft::assemble_complex(&c).map_err(|e| e.to_string())?;
        let fc = cx.filtered();
        let (lo, hi) = (fc.min_weight(), fc.max_weight());
        let place = |source_weight: i64, matrix: F2Matrix| PlacedBlock {
            r: 2,
            source_weight,
            row_offset: 0,
            col_offset: 0,
            matrix,
        };
        let mut blocks = Vec::new();
        if i % 2 == 0 {
            if let Some((src, h)) = (lo..=hi - 2).find_map(|s| common::killing_block(fc, s).map(|h| (s, h))) {
                blocks.push(place(src, h));
                killing += 1;
            }
        }
        if blocks.is_empty() {
            let w0 = rng.gen_range(lo..hi);
            blocks.extend(common::conjugation_blocks(&mut rng, fc, w0).into_iter().map(|(s, m)| place(s, m)));
            conjugated += 1;
        }
        let aug = specseq::load_higher_maps(fc, &blocks).map_err(|e| format!("{w}: {e}"))?;
        let pages = specseq::compute_pages(&aug, None).map_err(|e| format!("{w}: {e}"))?;
        let dim = aug.total_dim();
        let direct = dim - 2 * common::naive_rank(&common::to_dense(&aug.total_differential()));
        let e_inf = pages.e_infinity().ok_or("no limit page")?.total();
        ensure(e_inf == direct, || format!("{w}: E_inf {e_inf}, direct homology {direct}"))?;
        for pair in pages.pages.windows(2) {
            ensure(pair[0].dims.iter().zip(&pair[1].dims).all(|(a, b)| b <= a), || {
                format!("{w}: page {} grows", pair[1].r)
            })?;
        }
        let s = pages.stabilized_at.ok_or("not stabilized")?;
        ensure(s <= n + 1, || format!("{w}: stabilizes at {s} > N + 1 = {}", n + 1))?;
        ensure(pages.pages.len() <= n + 1, || format!("{w}: {} pages", pages.pages.len()))?;
    }
    Ok(format!("100 complexes ({killing} with a nonzero d_2, {conjugated} perturbed by conjugation)"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let rows = rng.gen_range(0..=100);
        let cols = rng.gen_range(0..=100);
        let density = rng.gen_range(0.02..0.6);
        let a = common::random_dense(&mut rng, rows, cols, density);
        let m = common::from_dense(&a, cols);
        let rank = common::naive_rank(&a);
        ensure(m.rank() == rank, || format!("{rows}x{cols}: rank {} vs {rank}", m.rank()))?;
        let ker = m.kernel_basis();
        ensure(ker.dim() == cols - rank, || format!("{rows}x{cols}: nullity {}", ker.dim()))?;
        let kb = common::to_dense(ker.basis());
        ensure(common::naive_rank(&kb) == ker.dim(), || "kernel basis is dependent".into())?;
        for v in &kb {
            ensure(a.iter().all(|row| common::dot(row, v) == 0), || format!("{rows}x{cols}: kernel vector not killed"))?;
        }
        let inner = rng.gen_range(0..=100);
        let b = common::random_dense(&mut rng, cols, inner, density);
        let prod = m.matmul(&common::from_dense(&b, inner)).unwrap();
        let naive = common::naive_matmul(&a, &b, cols, inner);
        ensure(common::to_dense(&prod) == naive, || format!("{rows}x{cols}x{inner}: product differs"))?;
    }
    Ok("500 matrices".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 7] = [
        ("unknot", criterion_1, 1),
        ("trefoil", criterion_2, 1),
        ("figure-eight and Hopf link", criterion_3, 2),
        ("alternating plats, E_2 = 2 det", criterion_4, 60),
        ("structural suite", criterion_5, 60),
        ("spectral sequence engine", criterion_6, 60),
        ("GF(2) linear algebra", criterion_7, 30),
    ];
    // optional criterion numbers on the command line select a subset
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|m| {
            if secs < *limit as f64 {
                Ok(m)
            } else {
                Err(format!("{m}; over the {limit} s limit"))
            }
        });
        match outcome {
            Ok(m) => println!("acceptance {} {name}: PASS ({m}; {secs:.2} s, limit {limit} s)", i + 1),
            Err(m) => {
                failed += 1;
                println!("acceptance {} {name}: FAIL ({m}; {secs:.2} s, limit {limit} s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
