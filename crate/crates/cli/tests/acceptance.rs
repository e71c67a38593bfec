//! Acceptance run: one line per criterion, sequential so each time limit
//! measures its own work. Exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cli::{run, run_in_workspace, IdealTarget, Report, RunConfig, Status, Suite, SuiteReport};

const EXAMPLES: [&str; 4] = ["abelian(1)", "abelian(2)", "weyl(1)", "sl2"];
const POINT_EXAMPLES: [&str; 3] = ["abelian(1)", "abelian(2)", "sl2"];

/// C(n, k) by Pascal's rule, 0 outside 0 ≤ k ≤ n.
fn choose(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let mut row = vec![1i64];
    for _ in 0..n {
        let mut next = vec![1i64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k as usize]
}

/// Monomials of degree d in m variables, by enumeration.
fn monomials(m: usize, d: i64) -> i64 {
    if d < 0 {
        return 0;
    }
    fn go(m: usize, d: i64) -> i64 {
        if m == 1 {
            return 1;
        }
        (0..=d).map(|k| go(m - 1, d - k)).sum()
    }
    go(m, d)
}

/// C(x, 2) as a polynomial in x.
fn poly_choose2(x: i64) -> i64 {
    x * (x - 1) / 2
}

fn rank_of(name: &str) -> usize {
    match name {
        "abelian(1)" | "weyl(1)" => 1,
        "abelian(2)" => 2,
        "sl2" => 3,
        _ => unreachable!(),
    }
}

fn config(name: &str, suites: &[Suite]) -> RunConfig {
    let mut c = RunConfig::builtin(name, suites);
    c.seed = 20240601;
    c
}

fn suite_of(r: &Report, s: Suite) -> Result<&SuiteReport, String> {
    let sr = r.suite(s).ok_or_else(|| format!("{} missing", s.name()))?;
    if sr.status != Status::Pass {
        return Err(format!("{} {:?}: {}", s.name(), sr.status, sr.reason.clone().unwrap_or_default()));
    }
    Ok(sr)
}

fn go(c: RunConfig) -> Result<Report, String> {
    run(c).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pbw_counts() -> Result<String, String> {
    let mut c = config("sl2", &[Suite::Pbw]);
    c.window.degree = 8;
    let r = go(c)?;
    let s = suite_of(&r, Suite::Pbw)?;
    let got: Vec<i64> = s.records_for("dim U_i").map(|r| r.rank).collect();
    let want: Vec<i64> = (0..=8).map(|i| choose(3 + i, 3)).collect();
    ensure(want == vec![1, 4, 10, 20, 35, 56, 84, 120, 165], || "oracle disagrees with the listed counts".into())?;
    ensure(got == want, || format!("dims {got:?}"))?;
    Ok(format!("dims {got:?}"))
}

fn koszul_exactness() -> Result<String, String> {
    let mut entries = 0;
    for name in EXAMPLES {
        let mut c = config(name, &[Suite::Koszul]);
        c.window.degree = 8;
        let r = go(c)?;
        let s = suite_of(&r, Suite::Koszul)?;
        for side in ["left", "right"] {
            ensure(s.check(&format!("{side}: d² = 0")).is_some_and(|c| c.status == Status::Pass), || format!("{name} {side}: d² ≠ 0"))?;
            let recs: Vec<_> = s.records.iter().filter(|r| r.item.starts_with(side)).collect();
            ensure(!recs.is_empty(), || format!("{name} {side}: no homology records"))?;
            for rec in &recs {
                let d = rec.internal_degree.unwrap();
                let want = match rec.position {
                    Some(0) if d == 0 => 1,
                    _ => 0,
                };
                ensure(rec.rank == want, || format!("{name} {side}: H_{:?} in degree {d} has rank {}", rec.position, rec.rank))?;
            }
            ensure(recs.iter().any(|r| r.internal_degree == Some(8)), || format!("{name} {side}: degree 8 not reached"))?;
            entries += recs.len();
        }
    }
    Ok(format!("{entries} homology entries, H⁰ = O in degree 0 only"))
}

fn dual_structure() -> Result<String, String> {
    for name in EXAMPLES {
        let n = rank_of(name) as i64;
        let r = go(config(name, &[Suite::Dual]))?;
        let s = suite_of(&r, Suite::Dual)?;
        for rec in s.records_for("rank of the dual") {
            let i = rec.internal_degree.unwrap();
            ensure(rec.rank == choose(n, i) + choose(n, i - 1), || format!("{name}: rank in degree {i} is {}", rec.rank))?;
        }
        for i in 0..=n + 1 {
            ensure(s.check(&format!("frobenius {i}")).is_some_and(|c| c.status == Status::Pass), || format!("{name}: pairing {i}"))?;
        }
        let rel = s.check("dual relations").ok_or("no relation check")?;
        ensure(rel.status == Status::Pass && rel.detail.as_deref().is_some_and(|d| d.ends_with(" 0 residuals")), || format!("{name}: {:?}", rel.detail))?;
        if name != "weyl(1)" {
            let ext: Vec<i64> = s.records_for("dim Ext^k").map(|r| r.rank).collect();
            let want: Vec<i64> = (0..ext.len() as i64).map(|k| choose(n + 1, k)).collect();
            ensure(!ext.is_empty() && ext == want, || format!("{name}: Ext dims {ext:?}"))?;
        }
    }
    Ok("ranks, pairings, relations and Ext dims on all four".into())
}

fn diagonal_resolution() -> Result<String, String> {
    let mut cells = 0;
    for name in ["abelian(1)", "sl2"] {
        let n = rank_of(name);
        let mut c = config(name, &[Suite::Diagonal]);
        c.window.p = 4;
        c.window.q = 4;
        let r = go(c)?;
        let s = suite_of(&r, Suite::Diagonal)?;
        for p in 0..=4 {
            for q in 0..=4 {
                let recs: Vec<_> = s.records_for(&format!("p={p} q={q}")).collect();
                ensure(!recs.is_empty(), || format!("{name}: bidegree ({p}, {q}) missing"))?;
                for rec in recs {
                    let want = if rec.position == Some(0) { monomials(n + 1, p + q) } else { 0 };
                    ensure(rec.rank == want, || format!("{name} ({p}, {q}): H_{:?} = {}", rec.position, rec.rank))?;
                }
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} bidegrees exact, cokernels = rank U^(p+q)"))
}

fn gorenstein() -> Result<String, String> {
    for name in EXAMPLES {
        let n = rank_of(name) as i64;
        let r = go(config(name, &[Suite::Gorenstein]))?;
        let s = suite_of(&r, Suite::Gorenstein)?;
        let mut line = 0;
        for rec in &s.records {
            if rec.rank != 0 {
                ensure(rec.position == Some(0) && rec.internal_degree == Some(-(n + 1)), || {
                    format!("{name}: homology {} at position {:?}, degree {:?}", rec.rank, rec.position, rec.internal_degree)
                })?;
                line += rec.rank;
            }
        }
        ensure(line == 1, || format!("{name}: line of rank {line}"))?;
    }
    Ok("one rank-one line at -(n+1) on all four".into())
}

fn tau_vanishing(limit_sl2: Duration) -> Result<String, String> {
    let mut sl2_time = Duration::ZERO;
    for name in POINT_EXAMPLES {
        let n = rank_of(name) as i64;
        let t = Instant::now();
        let r = go(config(name, &[Suite::Tau]))?;
        if name == "sl2" {
            sl2_time = t.elapsed();
        }
        let s = suite_of(&r, Suite::Tau)?;
        let cells: Vec<_> = s.records_for("R^kτ(Ũ)").collect();
        let (mut kmax, mut jmin) = (0, 0);
        for rec in &cells {
            let (k, j) = (rec.position.unwrap(), rec.internal_degree.unwrap());
            kmax = kmax.max(k);
            jmin = jmin.min(j);
            let want = if k == n + 1 { monomials(n as usize + 1, -j - n - 1) } else { 0 };
            ensure(rec.rank == want, || format!("{name}: R^{k}τ(Ũ)_{j} = {}", rec.rank))?;
            ensure(rec.certificate.as_deref().is_some_and(|c| c.starts_with("stable")), || format!("{name}: ({k}, {j}) uncertified"))?;
        }
        ensure(kmax >= n + 2 && jmin <= -n - 3, || format!("{name}: window k ≤ {kmax}, j ≥ {jmin}"))?;
        for i in 0..=n {
            for j in 0..=n {
                let rec = s.records_for(&format!("dim Hom(Q{i}, Q{j})")).next().ok_or("missing Hom block")?;
                let want = if j >= i { monomials(n as usize + 1, j - i) } else { 0 };
                ensure(rec.rank == want, || format!("{name}: Hom(Q{i}, Q{j}) = {}", rec.rank))?;
            }
        }
        let higher: Vec<_> = s.records_for("R^kωπ(Ũ)").collect();
        ensure(!higher.is_empty() && higher.iter().all(|r| r.rank == 0), || format!("{name}: higher Ext"))?;
    }
    ensure(sl2_time <= limit_sl2, || format!("sl2 took {:.1}s", sl2_time.as_secs_f64()))?;
    Ok(format!("pattern, Hom blocks, higher Ext; sl2 {:.1}s", sl2_time.as_secs_f64()))
}

fn round_trips() -> Result<String, String> {
    let mut count = 0;
    for name in POINT_EXAMPLES {
        let n = rank_of(name) as i64;
        let mut c = config(name, &[Suite::Beilinson]);
        // Ũ(−i) and Ũ(i), i = 0..=n
        c.targets.twists = Some((-n..=n).collect());
        match name {
            "abelian(1)" => {
                for g in ["x", "x^2"] {
                    c.targets.ideals.push(IdealTarget { top: 4, exact_through: 20, ..IdealTarget::new(&[g]) });
                }
            }
            "sl2" => c.targets.ideals.push(IdealTarget { top: 5, exact_through: 14, ..IdealTarget::new(&["e", "h"]) }),
            _ => {}
        }
        let r = go(c)?;
        let s = suite_of(&r, Suite::Beilinson)?;
        let trips = s.checks.iter().filter(|c| c.name.starts_with("round trip")).count();
        let want = (2 * n + 1) as usize + if name == "abelian(2)" { 0 } else if name == "sl2" { 1 } else { 2 };
        ensure(trips == want, || format!("{name}: {trips} round trips"))?;
        count += trips;
    }
    Ok(format!("{count} round trips incl. three ideals"))
}

fn k_theory() -> Result<String, String> {
    let mut c = config("abelian(1)", &[Suite::Ktheory]);
    c.targets.twists = Some(vec![-1]);
    let r = go(c)?;
    let s = suite_of(&r, Suite::Ktheory)?;
    let k: Vec<i64> = s.records_for("k_class Ũ(-1)").map(|r| r.rank).collect();
    ensure(k == vec![0, -1], || format!("k_class {k:?}"))?;
    let c1 = s.records_for("chern Ũ(-1)").find(|r| r.position == Some(1)).map(|r| r.rank);
    ensure(c1 == Some(-1), || format!("chern₁ {c1:?}"))?;
    let mut c = config("abelian(2)", &[Suite::Ktheory]);
    c.targets.twists = Some(vec![0, -1, -2]);
    let r = go(c)?;
    let s = suite_of(&r, Suite::Ktheory)?;
    let mut rows = 0;
    for i in 0..=2 {
        let recs: Vec<_> = s.records_for(&format!("χ Ũ({})", -i)).collect();
        ensure(!recs.is_empty(), || format!("no χ row for Ũ(−{i})"))?;
        for rec in recs {
            let j = rec.internal_degree.unwrap();
            ensure(rec.rank == poly_choose2(2 + j - i), || format!("χ(Ũ(−{i}))_{j} = {}", rec.rank))?;
        }
        rows += 1;
    }
    Ok(format!("k_class (0, -1), chern₁ = -1, {rows} χ rows on the plane"))
}

fn saturation() -> Result<String, String> {
    let mut c = config("abelian(1)", &[Suite::Ideals]);
    c.targets.ideals = vec![IdealTarget::new(&["x"]), IdealTarget::new(&["1"])];
    suite_of(&go(c)?, Suite::Ideals)?;
    let mut c = config("sl2", &[Suite::Ideals]);
    c.targets.ideals = vec![IdealTarget::new(&["e", "h"])];
    let r = go(c)?;
    let s = suite_of(&r, Suite::Ideals)?;
    // U/(e, h) has basis f^k: dim Ĩ_e = dim Ũ_e − (e + 1)
    for rec in s.records_for("dim Ĩ_e (e, h)") {
        let e = rec.internal_degree.unwrap();
        ensure(rec.rank == monomials(4, e) - (e + 1), || format!("dim Ĩ_{e} = {}", rec.rank))?;
    }
    Ok("(x), (1) on the line and (e, h) in sl2".into())
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("acceptance-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn determinism() -> Result<String, String> {
    let mut c = config("sl2", &Suite::ALL);
    c.targets.ideals = vec![IdealTarget::new(&["e", "h"])];
    let (a, b) = (scratch("a"), scratch("b"));
    let first = run_in_workspace(c.clone(), &a).map_err(|e| e.to_string())?.to_json();
    let second = run_in_workspace(c.clone(), &b).map_err(|e| e.to_string())?.to_json();
    let cached = run_in_workspace(c, &a).map_err(|e| e.to_string())?.to_json();
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
    ensure(first == second, || "fresh runs differ".into())?;
    ensure(first == cached, || "cached run differs".into())?;
    Ok(format!("{} bytes identical across two fresh runs and a cached run", first.len()))
}

type Criterion = (&'static str, u64, Box<dyn Fn() -> Result<String, String>>);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("PBW counts", 10, Box::new(pbw_counts)),
        ("Koszul exactness", 120, Box::new(koszul_exactness)),
        ("dual structure", 60, Box::new(dual_structure)),
        ("diagonal resolution", 180, Box::new(diagonal_resolution)),
        ("relative Gorenstein", 60, Box::new(gorenstein)),
        // the 5 minute limit applies to sl2; the whole criterion gets the same
        ("tau vanishing / End(T)", 300, Box::new(|| tau_vanishing(Duration::from_secs(300)))),
        ("round trip", 300, Box::new(round_trips)),
        ("K-theory / Chern", 60, Box::new(k_theory)),
        ("saturation", 60, Box::new(saturation)),
        ("determinism", 600, Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        let verdict = match &result {
            Ok(_) if secs > *limit as f64 => Err(format!("over time limit of {limit}s")),
            Ok(msg) => Ok(msg.clone()),
            Err(e) => Err(e.clone()),
        };
        match verdict {
            Ok(msg) => println!("criterion {:>2} {:<24} PASS  {:>6.1}s (limit {limit}s)  {msg}", i + 1, name, secs),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {:<24} FAIL  {:>6.1}s (limit {limit}s)  {e}", i + 1, name, secs);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
