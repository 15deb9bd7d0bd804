use std::process::Command;
use std::time::{Duration, Instant};

use qshape_core::complexes::Window;
use qshape_core::field::{FieldSpec, Fp, Prime, Rational};
use qshape_core::harness::{self, AlgebraSpec, Check, Problem, Report, DEFAULT_SEED, SCHEMA_VERSION};
use qshape_core::presentations::QuiverPresentation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: false,
        detail: detail.into(),
    }
}

fn problem(
    name: &str,
    shape: QuiverPresentation,
    algebra: Option<AlgebraSpec>,
    field: FieldSpec,
    r: i64,
    suites: &[&str],
) -> Problem {
    Problem {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        shape,
        algebra,
        field,
        window: Window { lo: -r, hi: r },
        suites: suites.iter().map(|s| s.to_string()).collect(),
        seed: DEFAULT_SEED,
    }
}

const F: FieldSpec = FieldSpec::Prime(32003);

fn run(p: &Problem) -> Result<Report, String> {
    harness::run_problem(p).map_err(|e| format!("{}: {e}", p.name))
}

fn first_failure(r: &Report) -> Option<String> {
    r.failed_checks().next().map(|c| {
        format!(
            "{}: {}/{} at pair {:?} degree {:?}: {}",
            r.problem, c.location.suite, c.name, c.location.pair, c.location.degree, c.detail
        )
    })
}

fn checks<'a>(r: &'a Report, suite: &str, name: &str) -> Vec<&'a Check> {
    r.suite(suite)
        .map(|s| s.checks.iter().filter(|c| c.name == name).collect())
        .unwrap_or_default()
}

fn psi_oracle() -> Result<String, String> {
    let cases = [
        ("2-cyclic", QuiverPresentation::cyclic(2, 2)),
        ("3-cyclic", QuiverPresentation::cyclic(3, 2)),
        ("cube", QuiverPresentation::truncated_polynomial(3)),
    ];
    let mut total = 0;
    for (name, shape) in cases {
        let n = shape.vertices.len();
        let r = run(&problem(name, shape, None, F, 10, &["lemma-psi"]))?;
        if let Some(f) = first_failure(&r) {
            return Err(f);
        }
        let c = checks(&r, "lemma-psi", "psi-oracle");
        for x in 0..n {
            for y in 0..n {
                for t in -4..=4 {
                    if !c.iter().any(|c| c.location.pair == Some([x, y]) && c.location.degree == Some(t)) {
                        return Err(format!("{name}: no comparison for ({x}, {y}) in degree {t}"));
                    }
                }
            }
        }
        total += c.len();
    }
    Ok(format!("{total} comparisons over degrees -4..4 agree"))
}

fn laurent() -> Result<String, String> {
    let mut out = Vec::new();
    for (m, r) in [(2usize, 6), (3, 8)] {
        let p = problem(&format!("{m}-cyclic"), QuiverPresentation::cyclic(m, 2), None, F, r, &["m-periodic"]);
        let rep = run(&p)?;
        if let Some(f) = first_failure(&rep) {
            return Err(f);
        }
        let m = m as i64;
        let dims = checks(&rep, "m-periodic", "laurent-dimension");
        let s0: Vec<&&Check> = dims.iter().filter(|c| c.location.pair == Some([0, 0])).collect();
        if s0.len() != (2 * m + 1) as usize {
            return Err(format!("m = {m}: expected {} degrees, got {}", 2 * m + 1, s0.len()));
        }
        let inv = checks(&rep, "m-periodic", "generator-inverse");
        if !inv.iter().any(|c| c.location.pair == Some([0, 0]) && c.location.degree == Some(m)) {
            return Err(format!("m = {m}: no generator product check"));
        }
        let table = &rep.suite("m-periodic").unwrap().tables[0];
        out.push(format!("m = {m}: {}", table.rows[0].cells.join(" ")));
    }
    Ok(out.join("; "))
}

fn main_theorem() -> Result<String, String> {
    let suites = ["lemma-rho", "dg-functor", "main-theorem"];
    let algebras = [
        ("dual numbers", AlgebraSpec::Quiver(QuiverPresentation::truncated_polynomial(2)), 2),
        ("k x k", AlgebraSpec::SplitSemisimple(2), 2),
    ];
    let mut out = Vec::new();
    for (name, a, da) in algebras {
        let p = problem(name, QuiverPresentation::cyclic(2, 2), Some(a), F, 3, &suites);
        let r = run(&p)?;
        if let Some(f) = first_failure(&r) {
            return Err(f);
        }
        for (suite, check) in [
            ("dg-functor", "phi-differential"),
            ("dg-functor", "phi-composition"),
            ("lemma-rho", "rho-bijective"),
            ("lemma-rho", "rho-composition"),
            ("main-theorem", "key-square"),
        ] {
            if checks(&r, suite, check).is_empty() {
                return Err(format!("{name}: {suite}/{check} never ran"));
            }
        }
        let table = &r.suite("main-theorem").unwrap().tables[0];
        let row = &table.rows[0];
        for (col, cell) in table.columns.iter().zip(&row.cells) {
            let t: i64 = col.parse().unwrap();
            let expect = if t % 2 == 0 { da } else { 0 };
            if cell != &expect.to_string() {
                return Err(format!("{name}: {} in degree {t} is {cell}, expected {expect}", row.label));
            }
        }
        let squares = checks(&r, "main-theorem", "key-square").len();
        out.push(format!("{name}: {squares} key-square degrees exact"));
    }
    Ok(out.join("; "))
}

const SIGN_CASES: u64 = 120;

fn sign_calculus() -> Result<String, String> {
    for seed in 0..SIGN_CASES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let results = if seed % 2 == 0 {
            harness::sign_calculus_case::<Fp, _>(Prime::new(5).unwrap(), &mut rng)
        } else {
            harness::sign_calculus_case::<Rational, _>((), &mut rng)
        }
        .map_err(|e| e.to_string())?;
        if let Some((name, _)) = results.iter().find(|(_, ok)| !ok) {
            return Err(format!("seed {seed}: {name}"));
        }
    }
    Ok(format!("{SIGN_CASES} cases, {} random complexes", 3 * SIGN_CASES))
}

fn module_layer() -> Result<String, String> {
    let shapes = [
        ("2-cyclic", QuiverPresentation::cyclic(2, 2), Some("Ω^2 S_0 ≅ S_0")),
        ("3-cyclic", QuiverPresentation::cyclic(3, 2), Some("Ω^3 S_0 ≅ S_0")),
        ("4-cyclic N=3", QuiverPresentation::cyclic(4, 3), None),
        ("dual numbers", QuiverPresentation::truncated_polynomial(2), None),
        ("cube", QuiverPresentation::truncated_polynomial(3), Some("Ω^2 S_* ≅ S_*")),
    ];
    let mut certified = Vec::new();
    for (name, shape, cert) in shapes {
        let r = run(&problem(name, shape, None, F, 3, &["module-layer"]))?;
        if let Some(f) = first_failure(&r) {
            return Err(f);
        }
        for c in ["yoneda", "stable-hom-of-projective", "cover-minimality", "self-injective"] {
            if checks(&r, "module-layer", c).is_empty() {
                return Err(format!("{name}: {c} never ran"));
            }
        }
        if let Some(subject) = cert {
            let s = r.suite("module-layer").unwrap();
            if !s.certificates.iter().any(|c| c.subject == subject) {
                return Err(format!("{name}: no certificate for {subject}"));
            }
            certified.push(subject);
        }
    }
    Ok(format!("certified {}", certified.join(", ")))
}

fn non_formality() -> Result<String, String> {
    let f3 = FieldSpec::Prime(3);
    let cube = problem("cube", QuiverPresentation::truncated_polynomial(3), None, f3, 6, &["non-formality"]);
    let r = run(&cube)?;
    if let Some(f) = first_failure(&r) {
        return Err(f);
    }
    if checks(&r, "non-formality", "odd-square-vanishes").is_empty() {
        return Err("H^1 x H^1 never checked".into());
    }
    let square = problem("square", QuiverPresentation::truncated_polynomial(2), None, f3, 6, &["m-periodic"]);
    let r = run(&square)?;
    if let Some(f) = first_failure(&r) {
        return Err(f);
    }
    let inv = checks(&r, "m-periodic", "generator-inverse");
    if !inv.iter().any(|c| c.location.degree == Some(1)) {
        return Err("degree-1 invertibility never checked for the square-zero shape".into());
    }
    Ok("cube: dims 1, H^1 x H^1 = 0; square-zero: degree-1 class invertible".into())
}

fn qshape(args: &[&str]) -> Result<(Option<i32>, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qshape"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn cli_round_trip() -> Result<String, String> {
    let schema: serde_json::Value = serde_json::from_str(harness::REPORT_SCHEMA).map_err(|e| e.to_string())?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let validate = |text: &str, what: &str| -> Result<serde_json::Value, String> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("{what}: {e}"))?;
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{e} at {}", e.instance_path)).collect();
        if !errors.is_empty() {
            return Err(format!("{what}: {}", errors.join("; ")));
        }
        Ok(v)
    };
    for (name, _) in harness::FIXTURES {
        let (code, out) = qshape(&["check", name])?;
        if code != Some(0) {
            return Err(format!("check {name} exited with {code:?}"));
        }
        let a = validate(&out, name)?;
        let (_, again) = qshape(&["check", name])?;
        let b = validate(&again, name)?;
        let tables = |v: &serde_json::Value| {
            v["suites"]
                .as_array()
                .unwrap()
                .iter()
                .map(|s| serde_json::to_string(&s["tables"]).unwrap())
                .collect::<Vec<_>>()
        };
        if tables(&a) != tables(&b) {
            return Err(format!("{name}: tables differ between runs with the same seed"));
        }
    }
    for verb in ["resolve", "endring", "homtable"] {
        let (code, out) = qshape(&[verb, "cyclic2", "--window", "-4,4", "--seed", "7"])?;
        if code != Some(0) {
            return Err(format!("{verb} exited with {code:?}"));
        }
        validate(&out, verb)?;
    }
    // a one-object suite on a two-object shape must fail with exit code 1
    let (code, out) = qshape(&["check", "periodic2", "--suites", "non-formality"])?;
    if code != Some(1) {
        return Err(format!("failing check exited with {code:?}"));
    }
    validate(&out, "failing report")?;
    let (code, _) = qshape(&["check", "cyclic2", "--suites", "no-such-suite"])?;
    if code != Some(2) {
        return Err(format!("unknown suite exited with {code:?}"));
    }
    Ok(format!("{} bundled problems, 3 verbs, failure and error exit codes", harness::FIXTURES.len()))
}

type Criterion = (&'static str, fn() -> Result<String, String>, u64);

fn main() {
    let criteria: [Criterion; 7] = [
        ("stable Hom oracle", psi_oracle, 30),
        ("m-periodic Laurent pattern", laurent, 10),
        ("main theorem at window scale", main_theorem, 60),
        ("sign calculus", sign_calculus, 30),
        ("module layer", module_layer, 30),
        ("non-formality witness", non_formality, 10),
        ("CLI round trip", cli_round_trip, 5),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = match f() {
            Ok(detail) => Outcome { passed: true, detail },
            Err(e) => fail(e),
        };
        let took = start.elapsed();
        let outcome = if outcome.passed && took > Duration::from_secs(budget) {
            fail(format!("took {:.2}s, budget {budget}s", took.as_secs_f64()))
        } else {
            outcome
        };
        failed += !outcome.passed as usize;
        println!(
            "criterion {}: {} [{name}] {:.2}s: {}",
            i + 1,
            if outcome.passed { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            outcome.detail
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
