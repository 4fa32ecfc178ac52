//! Acceptance suite: one pass/fail line per criterion.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use om_milnor::arrangement::{from_arrangement, Arrangement};
use om_milnor::homology::{os_betti, poset_homology};
use om_milnor::io::write_arrangement;
use om_milnor::milnor::{
    check_quasi_fibration, fibration, milnor_report, proof_matching, CircleCell,
};
use om_milnor::oriented_matroid::{validate_axioms, OrientedMatroid};
use om_milnor::subdivision::verify_subdivision;
use om_milnor::{Sign, SignVector};

const BIN: &str = env!("CARGO_BIN_EXE_om-milnor");

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn arrangement(normals: &[Vec<i64>]) -> Arrangement {
    Arrangement::from_integers(normals).unwrap()
}

fn om(normals: &[Vec<i64>]) -> OrientedMatroid {
    from_arrangement(&arrangement(normals)).unwrap()
}

fn hexagon() -> Vec<Vec<i64>> {
    vec![vec![1, 0], vec![0, 1], vec![1, -1]]
}

fn boolean(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect()
}

fn suite() -> Vec<(&'static str, Vec<Vec<i64>>)> {
    vec![
        ("one line", vec![vec![1]]),
        ("xy(x-y)", hexagon()),
        ("B_2", boolean(2)),
        ("B_3", boolean(3)),
        (
            "xyz(x+y)(y+z)",
            vec![
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![1, 1, 0],
                vec![0, 1, 1],
            ],
        ),
    ]
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        return Err(format!("{what} took {t:?}, limit {limit:?}"));
    }
    Ok(())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_cli(args: &[&str], threads: &str) -> (i32, Vec<u8>) {
    let out = Command::new(BIN)
        .args(args)
        .env("OM_MILNOR_THREADS", threads)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn milnor_fiber_of_hexagon(dir: &Path) -> Outcome {
    let file = dir.join("hexagon.arr");
    std::fs::write(&file, write_arrangement(&arrangement(&hexagon()))).unwrap();
    let start = Instant::now();
    let (code, out) = run_cli(&["milnor", "--json", file.to_str().unwrap()], "1");
    within(start, Duration::from_secs(5), "milnor")?;
    ensure(code == 0, || format!("exit code {code}"))?;
    let v: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    ensure(v["betti"] == serde_json::json!([1, 4]), || {
        format!("betti {}", v["betti"])
    })?;
    ensure(v["torsion"] == serde_json::json!([]), || {
        format!("torsion {}", v["torsion"])
    })?;
    Ok("betti [1, 4], no torsion".into())
}

fn identity_base_case() -> Outcome {
    let start = Instant::now();
    let m = om(&[vec![1]]);
    let fib = fibration(&m).map_err(|e| e.to_string())?;
    ensure(fib.len() == 4, || format!("{} cells", fib.len()))?;
    let mut images: Vec<CircleCell> = fib.map.clone();
    images.sort();
    ensure(images == CircleCell::ALL, || format!("images {images:?}"))?;
    for (x, c) in fib.map.iter().enumerate() {
        let cell = fib.sd.salvetti.poset.label(fib.sd.carrier[x]);
        ensure(cell == c.to_string(), || format!("{cell} maps to {c}"))?;
    }
    let pm = fib.poset_map().map_err(|e| e.to_string())?;
    ensure(pm.is_isomorphism(), || "not an isomorphism".into())?;
    let r = milnor_report(&m, &fib).map_err(|e| e.to_string())?;
    ensure(r.betti == [1], || format!("betti {:?}", r.betti))?;
    within(start, Duration::from_secs(1), "identity case")?;
    Ok("Q~ is the identity of C, fiber betti [1]".into())
}

// (1+t)^{n-1}
fn torus_betti(n: usize) -> Vec<usize> {
    (0..n)
        .map(|k| (0..k).fold(1usize, |acc, i| acc * (n - 1 - i) / (i + 1)))
        .collect()
}

fn boolean_fibers() -> Outcome {
    let start = Instant::now();
    let mut seen = Vec::new();
    for n in [2, 3] {
        let m = om(&boolean(n));
        let fib = fibration(&m).map_err(|e| e.to_string())?;
        let r = milnor_report(&m, &fib).map_err(|e| e.to_string())?;
        let expected = torus_betti(n);
        ensure(r.betti == expected && r.torsion.is_empty(), || {
            format!(
                "B_{n}: betti {:?} torsion {:?}, expected {expected:?}",
                r.betti, r.torsion
            )
        })?;
        seen.push(format!("B_{n} {:?}", r.betti));
    }
    within(start, Duration::from_secs(30), "boolean fibers")?;
    Ok(seen.join(", "))
}

fn salvetti_vs_lattice() -> Outcome {
    for (name, normals) in suite() {
        let start = Instant::now();
        let m = om(&normals);
        let s = om_milnor::salvetti::salvetti_poset(&m);
        let h = poset_homology(&s.poset).map_err(|e| e.to_string())?;
        let os = os_betti(&m.geometric_lattice().0).map_err(|e| e.to_string())?;
        let hb: Vec<u64> = h.betti.iter().map(|&b| b as u64).collect();
        ensure(hb == os.betti && h.torsion.is_empty(), || {
            format!(
                "{name}: salvetti {:?} torsion {:?}, lattice {:?}",
                h.betti, h.torsion, os.betti
            )
        })?;
        within(start, Duration::from_secs(120), name)?;
    }
    Ok("all five agree, torsion free".into())
}

fn subdivision_invariance() -> Outcome {
    for (name, normals) in suite() {
        let start = Instant::now();
        let m = om(&normals);
        for t in m.topes() {
            let r = verify_subdivision(&m, t).map_err(|e| e.to_string())?;
            ensure(r.euler == 1 && r.ball && r.spherical_intervals, || {
                format!("{name} base {t}: {r:?}")
            })?;
        }
        let sd = om_milnor::subdivision::rank_subdivide_salvetti(&m).map_err(|e| e.to_string())?;
        let a = poset_homology(&sd.poset).map_err(|e| e.to_string())?;
        let b = poset_homology(&sd.salvetti.poset).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name}: rk sd S {a:?} vs S {b:?}"))?;
        within(start, Duration::from_secs(300), name)?;
    }
    Ok("every base tope, every suite member".into())
}

fn quasi_fibration() -> Outcome {
    let mut fibers = Vec::new();
    for (name, normals) in suite() {
        let start = Instant::now();
        let m = om(&normals);
        let fib = fibration(&m).map_err(|e| e.to_string())?;
        let q = check_quasi_fibration(&fib).map_err(|e| e.to_string())?;
        ensure(q.ok, || format!("{name}: {q:?}"))?;
        fibers.push(format!("{name} {:?}", q.fibers[0].homology.betti));
        within(start, Duration::from_secs(300), name)?;
    }
    Ok(fibers.join(", "))
}

fn matching() -> Outcome {
    let mut total = 0;
    for (name, normals) in suite() {
        let start = Instant::now();
        let m = om(&normals);
        let fib = fibration(&m).map_err(|e| e.to_string())?;
        let pm = proof_matching(&m, &fib, CircleCell::PP, CircleCell::ZP)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(pm.critical == pm.expected_critical, || {
            format!("{name}: critical set differs")
        })?;
        ensure(pm.morse_homology == pm.direct_homology, || {
            format!("{name}: homology differs")
        })?;
        total += pm.pairs.len();
        within(start, Duration::from_secs(60), name)?;
    }
    Ok(format!("{total} matched pairs, closed-form critical sets"))
}

fn euler_identity() -> Outcome {
    let mut seen = Vec::new();
    for (name, normals) in suite() {
        let m = om(&normals);
        let fib = fibration(&m).map_err(|e| e.to_string())?;
        let r = milnor_report(&m, &fib).map_err(|e| e.to_string())?;
        ensure(r.euler == r.n as i64 * r.chi_projective, || {
            format!("{name}: {} != {} * {}", r.euler, r.n, r.chi_projective)
        })?;
        seen.push(format!("{}={}*{}", r.euler, r.n, r.chi_projective));
    }
    Ok(seen.join(", "))
}

fn corrupt(covectors: &[SignVector], rng: &mut ChaCha8Rng) -> Vec<SignVector> {
    let mut out = covectors.to_vec();
    let i = rng.gen_range(0..out.len());
    if rng.gen_bool(0.25) {
        out.remove(i);
        return out;
    }
    let e = rng.gen_range(0..out[i].len());
    let old = out[i].get(e);
    let new = *[Sign::Zero, Sign::Plus, Sign::Minus]
        .iter()
        .filter(|&&s| s != old)
        .collect::<Vec<_>>()
        .choose(rng)
        .unwrap();
    out[i].set(e, *new);
    out
}

fn axiom_fuzzing() -> Outcome {
    let start = Instant::now();
    let oms: Vec<OrientedMatroid> = suite().iter().map(|(_, n)| om(n)).collect();
    for m in &oms {
        let r = validate_axioms(m.covectors()).map_err(|e| e.to_string())?;
        ensure(r.ok, || format!("valid input rejected: {r:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let trials = 200;
    for _ in 0..trials {
        let m = &oms[rng.gen_range(0..oms.len())];
        let bad = corrupt(m.covectors(), &mut rng);
        let r = validate_axioms(&bad).map_err(|e| e.to_string())?;
        ensure(!r.ok, || format!("corruption accepted: {bad:?}"))?;
    }
    within(start, Duration::from_secs(60), "fuzzing")?;
    Ok(format!(
        "{trials} corruptions rejected, {} valid inputs accepted",
        oms.len()
    ))
}

fn determinism(dir: &Path) -> Outcome {
    let mut runs = 0;
    for (name, normals) in [("hexagon", hexagon()), ("b2", boolean(2))] {
        let file = dir.join(format!("{name}.arr"));
        std::fs::write(&file, write_arrangement(&arrangement(&normals))).unwrap();
        let f = file.to_str().unwrap();
        let (_, covectors) = run_cli(&["covectors", f], "1");
        let om_file = dir.join(format!("{name}.om"));
        std::fs::write(&om_file, covectors).unwrap();
        let (_, facets) = run_cli(&["export", "--facets", "--complex", "salvetti", f], "1");
        let facet_file = dir.join(format!("{name}.facets"));
        std::fs::write(&facet_file, facets).unwrap();
        let commands: Vec<Vec<&str>> = vec![
            vec!["validate", "--json", om_file.to_str().unwrap()],
            vec!["covectors", "--json", f],
            vec!["info", "--json", f],
            vec!["salvetti", "--json", f],
            vec!["subdivide", "--json", "--base", "1", f],
            vec!["rksd", "--json", f],
            vec!["milnor", "--json", f],
            vec!["check", "--json", f],
            vec!["homology", "--json", facet_file.to_str().unwrap()],
            vec!["export", "--facets", f],
        ];
        for args in commands {
            let reference = run_cli(&args, "1");
            ensure(reference.0 == 0, || {
                format!("{args:?} exited with {}", reference.0)
            })?;
            for threads in ["1", "2", "4"] {
                let again = run_cli(&args, threads);
                ensure(again == reference, || {
                    format!("{args:?} differs with {threads} threads")
                })?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} repeated runs byte-identical"))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<Criterion> = vec![
        (
            "milnor fiber of xy(x-y)",
            Box::new(|| milnor_fiber_of_hexagon(dir.path())),
        ),
        ("identity base case", Box::new(identity_base_case)),
        ("boolean fibers", Box::new(boolean_fibers)),
        ("salvetti vs complement", Box::new(salvetti_vs_lattice)),
        ("subdivision invariance", Box::new(subdivision_invariance)),
        ("quasi-fibration certificate", Box::new(quasi_fibration)),
        ("proof matching", Box::new(matching)),
        ("euler identity", Box::new(euler_identity)),
        ("axiom fuzzing", Box::new(axiom_fuzzing)),
        ("determinism", Box::new(|| determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
