//! Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always
//! printed. Exits non-zero if any criterion fails.
//!
//! External AIGER instances for criterion 8 are read from the directory in
//! `PCH_EXTERNAL_AIGER_DIR` when it is set.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use pch::aiger::{self, Aig};
use pch::certificate::{bind, write_certificate, Certificate};
use pch::checker::{reach_bruteforce, validate, witness_satisfies, BruteForceLimits, CheckOptions, Outcome, Reachability, Strategy};
use pch::circuits::{gen_counter, gen_multiplier_pair, mutate_certificate, mutate_circuit};
use pch::encoder::encode;
use pch::ic3::{prove, Ic3Error, Ic3Options, ProveOutcome};
use pch::miter::build_equivalence_miter;
use pch::witness::Counterexample;

// Criterion 1
const MIN_SOUNDNESS_INSTANCES: usize = 200;
const MUTANTS_PER_BASE: u64 = 3;
const CORPUS_PROVE_LIMIT: Duration = Duration::from_secs(60);
// Criterion 3
const SPEEDUP_WIDTHS: std::ops::RangeInclusive<usize> = 4..=8;
const MAX_CHECK_TO_PROVE_RATIO: f64 = 0.5;
const MIN_FRACTION_WITHIN_RATIO: f64 = 0.9;
const MIN_GEOMEAN_SPEEDUP: f64 = 5.0;
const MULT_PROVE_LIMIT: Duration = Duration::from_secs(300);
// Criterion 4
const SIZE_WIDTHS: std::ops::RangeInclusive<usize> = 2..=8;
const MAX_CERT_BYTES: usize = 1536;
// Criterion 5
const CERT_TAMPERS: u64 = 100;
const CIRCUIT_TAMPERS: u64 = 100;
const TAMPER_MAX_STATE_BITS: usize = 16;
// Criterion 8
const EXTERNAL_PROVE_LIMIT: Duration = Duration::from_secs(60);

/// Reachable-state enumeration for the multiplier miters: many latches, but
/// only a few thousand reachable states.
fn oracle_limits() -> BruteForceLimits {
    BruteForceLimits::with_state_bits(64)
}

struct Instance {
    name: String,
    aig: Aig,
}

enum Proof {
    Proved { cert: Certificate, time: Duration },
    Cex(Counterexample),
    Limit,
}

fn run_prove(aig: &Aig, limit: Duration) -> Proof {
    let ts = encode(aig, 0).expect("corpus circuits encode");
    let start = Instant::now();
    match prove(&ts, &Ic3Options { time_limit: Some(limit), ..Default::default() }) {
        Ok(ProveOutcome::Proved(cert)) => Proof::Proved { cert: cert.with_digest_of(aig), time: start.elapsed() },
        Ok(ProveOutcome::Counterexample(cex)) => Proof::Cex(cex),
        Err(Ic3Error::ResourceLimit) => Proof::Limit,
        Err(e) => panic!("{e}"),
    }
}

/// Tallies shared by the criteria that look at every check and trace.
#[derive(Default)]
struct Ledger {
    checks: usize,
    strategy_disagreements: Vec<String>,
    witnesses: usize,
    bad_witnesses: Vec<String>,
    traces: usize,
    bad_traces: Vec<String>,
}

impl Ledger {
    /// Validates under both strategies; records agreement and re-checks
    /// every Invalid witness by clause evaluation. Returns the split outcome
    /// and its query time.
    fn check(&mut self, name: &str, aig: &Aig, cert: &Certificate, digest: bool) -> (Outcome, Duration) {
        let mut first = None;
        for strategy in [Strategy::Split, Strategy::Tseitin] {
            let v = validate(aig, 0, cert, &CheckOptions { strategy, check_digest: digest, parallel: false });
            if let Outcome::Invalid { query, witness } = &v.outcome {
                self.witnesses += 1;
                let ts = encode(aig, 0).unwrap();
                let f = bind(cert, aig, &ts.varmap, false).unwrap();
                if !witness_satisfies(&ts, &f, *query, witness) {
                    self.bad_witnesses.push(format!("{name} ({strategy:?} {query})"));
                }
            }
            match &first {
                None => first = Some((v.outcome.clone(), v.query_time())),
                Some((o, _)) if o.kind() != v.outcome.kind() => {
                    self.strategy_disagreements.push(format!("{name}: {:?} vs {:?}", o.kind(), v.outcome.kind()))
                }
                Some(_) => {}
            }
        }
        self.checks += 1;
        first.unwrap()
    }

    fn trace(&mut self, name: &str, aig: &Aig, cex: &Counterexample) {
        self.traces += 1;
        if !cex.replay(aig).unwrap_or(false) {
            self.bad_traces.push(name.to_string());
        }
    }
}

struct Line {
    id: usize,
    status: &'static str,
    title: &'static str,
    detail: String,
}

fn verdict(id: usize, title: &'static str, ok: bool, detail: String) -> Line {
    Line { id, status: if ok { "PASS" } else { "FAIL" }, title, detail }
}

fn base_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for w in 1..=8usize {
        let max = (1u64 << w) - 1;
        let mut bads: Vec<Option<u64>> = vec![None, Some(0), Some(max), Some(max / 2 + 1), Some(1), Some(max / 3)];
        bads.sort();
        bads.dedup();
        for bad in bads {
            let name = match bad {
                Some(v) => format!("counter{w}_bad{v}"),
                None => format!("counter{w}"),
            };
            out.push(Instance { name, aig: gen_counter(w, bad).unwrap() });
        }
        let c = gen_counter(w, None).unwrap();
        out.push(Instance { name: format!("counter{w}_selfmiter"), aig: build_equivalence_miter(&c, &c).unwrap() });
    }
    for w in 2..=4usize {
        let (s, i) = gen_multiplier_pair(w).unwrap();
        out.push(Instance { name: format!("mult{w}"), aig: build_equivalence_miter(&s, &i).unwrap() });
        out.push(Instance { name: format!("mult{w}_spec_self"), aig: build_equivalence_miter(&s, &s).unwrap() });
        out.push(Instance { name: format!("mult{w}_impl_self"), aig: build_equivalence_miter(&i, &i).unwrap() });
    }
    out
}

fn soundness_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for (k, base) in base_instances().into_iter().enumerate() {
        for m in 1..=MUTANTS_PER_BASE {
            let seed = 1000 * k as u64 + m;
            let (aig, kind) = mutate_circuit(&base.aig, seed).unwrap();
            out.push(Instance { name: format!("{}~{kind:?}@{seed}", base.name), aig });
        }
        out.push(base);
    }
    out
}

struct SafeProof {
    name: String,
    aig: Aig,
    cert: Certificate,
}

fn criterion_1(ledger: &mut Ledger, safe: &mut Vec<SafeProof>) -> Line {
    let start = Instant::now();
    let corpus = soundness_corpus();
    let mut compared = 0;
    let mut no_oracle = Vec::new();
    let mut mismatches = Vec::new();
    let (mut n_safe, mut n_unsafe) = (0, 0);
    for inst in corpus {
        let truth = match reach_bruteforce(&inst.aig, 0, &oracle_limits()) {
            Ok(t) => t,
            Err(e) => {
                no_oracle.push(format!("{} ({e})", inst.name));
                continue;
            }
        };
        compared += 1;
        match run_prove(&inst.aig, CORPUS_PROVE_LIMIT) {
            Proof::Proved { cert, .. } => {
                n_safe += 1;
                if !truth.is_safe() {
                    mismatches.push(format!("{}: proved but reachable bad", inst.name));
                }
                safe.push(SafeProof { name: inst.name, aig: inst.aig, cert });
            }
            Proof::Cex(cex) => {
                n_unsafe += 1;
                ledger.trace(&inst.name, &inst.aig, &cex);
                if let Reachability::Safe { .. } = truth {
                    mismatches.push(format!("{}: counterexample on a safe circuit", inst.name));
                }
            }
            Proof::Limit => mismatches.push(format!("{}: prove hit the {CORPUS_PROVE_LIMIT:?} limit", inst.name)),
        }
    }
    let ok = compared >= MIN_SOUNDNESS_INSTANCES && mismatches.is_empty();
    let mut detail = format!(
        "{}/{compared} verdicts agree with brute-force reachability ({n_safe} safe, {n_unsafe} unsafe; need >= {MIN_SOUNDNESS_INSTANCES}) in {:.1?}",
        compared - mismatches.len(),
        start.elapsed()
    );
    if !no_oracle.is_empty() {
        detail += &format!("; {} instances without oracle: {}", no_oracle.len(), no_oracle.join(", "));
    }
    if !mismatches.is_empty() {
        detail += &format!("; mismatches: {}", mismatches.join("; "));
    }
    verdict(1, "end-to-end soundness", ok, detail)
}

struct MultRun {
    width: usize,
    proof: Proof,
    check_time: Option<Duration>,
    bytes: Option<usize>,
}

fn multiplier_suite(ledger: &mut Ledger, safe: &mut Vec<SafeProof>) -> Vec<MultRun> {
    let widths: Vec<usize> = SIZE_WIDTHS.chain(SPEEDUP_WIDTHS).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let mut runs = Vec::new();
    for w in widths {
        let (s, i) = gen_multiplier_pair(w).unwrap();
        let aig = build_equivalence_miter(&s, &i).unwrap();
        let proof = run_prove(&aig, MULT_PROVE_LIMIT);
        let (mut check_time, mut bytes) = (None, None);
        match &proof {
            Proof::Proved { cert, time } => {
                let (outcome, q) = ledger.check(&format!("mult{w}"), &aig, cert, true);
                check_time = Some(q);
                bytes = Some(write_certificate(cert).len());
                eprintln!("mult{w}: prove {time:.2?}, check {q:.2?}, {} bytes, {:?}", bytes.unwrap(), outcome.kind());
                safe.push(SafeProof { name: format!("mult{w}"), aig: aig.clone(), cert: cert.clone() });
            }
            Proof::Cex(cex) => ledger.trace(&format!("mult{w}"), &aig, cex),
            Proof::Limit => eprintln!("mult{w}: prove hit the {MULT_PROVE_LIMIT:?} limit"),
        }
        runs.push(MultRun { width: w, proof, check_time, bytes });
    }
    runs
}

fn criterion_2(ledger: &mut Ledger, safe: &[SafeProof]) -> Line {
    let mut rejected = Vec::new();
    for p in safe {
        for strategy in [Strategy::Split, Strategy::Tseitin] {
            let v = validate(&p.aig, 0, &p.cert, &CheckOptions { strategy, ..Default::default() });
            if !v.outcome.is_valid() {
                rejected.push(format!("{} ({strategy:?}: {:?})", p.name, v.outcome.kind()));
            }
        }
        ledger.check(&p.name, &p.aig, &p.cert, true);
    }
    let detail = format!(
        "{}/{} certificates accepted under split and tseitin{}",
        safe.len() - rejected.len().min(safe.len()),
        safe.len(),
        if rejected.is_empty() { String::new() } else { format!("; rejected: {}", rejected.join(", ")) }
    );
    verdict(2, "certificate acceptance", rejected.is_empty() && !safe.is_empty(), detail)
}

fn criterion_3(runs: &[MultRun]) -> Line {
    let mut within = 0;
    let mut total = 0;
    let mut speedups = Vec::new();
    let mut parts = Vec::new();
    let mut complete = true;
    for r in runs.iter().filter(|r| SPEEDUP_WIDTHS.contains(&r.width)) {
        total += 1;
        match (&r.proof, r.check_time) {
            (Proof::Proved { time, .. }, Some(check)) => {
                let ratio = check.as_secs_f64() / time.as_secs_f64();
                if ratio <= MAX_CHECK_TO_PROVE_RATIO {
                    within += 1;
                }
                let speedup = time.as_secs_f64() / check.as_secs_f64().max(1e-6);
                speedups.push(speedup);
                parts.push(format!("w{} {:.3}s/{:.4}s={speedup:.0}x", r.width, time.as_secs_f64(), check.as_secs_f64()));
            }
            _ => {
                complete = false;
                parts.push(format!("w{} not proved", r.width));
            }
        }
    }
    let fraction = within as f64 / total.max(1) as f64;
    let geomean = if speedups.is_empty() {
        0.0
    } else {
        (speedups.iter().map(|s| s.ln()).sum::<f64>() / speedups.len() as f64).exp()
    };
    let ok = complete && fraction >= MIN_FRACTION_WITHIN_RATIO && geomean >= MIN_GEOMEAN_SPEEDUP;
    let detail = format!(
        "{within}/{total} instances with check <= {MAX_CHECK_TO_PROVE_RATIO} x prove (need {:.0}%), geometric-mean speed-up {geomean:.1}x (need {MIN_GEOMEAN_SPEEDUP}x): {}",
        MIN_FRACTION_WITHIN_RATIO * 100.0,
        parts.join(", ")
    );
    verdict(3, "validation speed-up", ok, detail)
}

fn criterion_4(runs: &[MultRun]) -> Line {
    let mut sizes = Vec::new();
    let mut ok = true;
    for r in runs.iter().filter(|r| SIZE_WIDTHS.contains(&r.width)) {
        match r.bytes {
            Some(b) => {
                ok &= b <= MAX_CERT_BYTES;
                sizes.push(format!("w{}={b}", r.width));
            }
            None => {
                ok = false;
                sizes.push(format!("w{}=none", r.width));
            }
        }
    }
    verdict(4, "proof size", ok, format!("bytes per width (limit {MAX_CERT_BYTES}): {}", sizes.join(", ")))
}

fn criterion_5(ledger: &mut Ledger, safe: &[SafeProof]) -> Line {
    let pool: Vec<&SafeProof> =
        safe.iter().filter(|p| p.aig.latches.len() <= TAMPER_MAX_STATE_BITS && !p.cert.is_empty()).collect();
    if pool.is_empty() {
        return verdict(5, "tamper-proofness", false, "no proved instance with a non-empty certificate".into());
    }
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    let mut unsound = Vec::new();
    let accepted = |name: String, aig: &Aig, tally: &mut BTreeMap<&str, usize>, unsound: &mut Vec<String>| {
        match reach_bruteforce(aig, 0, &BruteForceLimits::default()) {
            Ok(r) if r.is_safe() => *tally.entry("accepted, confirmed safe").or_default() += 1,
            Ok(_) => unsound.push(name),
            Err(e) => unsound.push(format!("{name} (no oracle: {e})")),
        }
    };
    for seed in 0..CERT_TAMPERS {
        let p = pool[seed as usize % pool.len()];
        let (cert, kind) = mutate_certificate(&p.cert, seed).unwrap();
        let name = format!("{} cert~{kind:?}@{seed}", p.name);
        match ledger.check(&name, &p.aig, &cert, true).0 {
            Outcome::Valid => accepted(name, &p.aig, &mut tally, &mut unsound),
            Outcome::Invalid { .. } => *tally.entry("cert mutant invalid").or_default() += 1,
            Outcome::Rejected(_) => *tally.entry("cert mutant rejected").or_default() += 1,
        }
    }
    for seed in 0..CIRCUIT_TAMPERS {
        let p = pool[seed as usize % pool.len()];
        let (aig, kind) = mutate_circuit(&p.aig, seed).unwrap();
        let name = format!("{} circuit~{kind:?}@{seed}", p.name);
        // The digest alone rejects any changed circuit; the strengthening
        // must also fail on its own.
        if ledger.check(&name, &aig, &p.cert, true).0.is_valid() && aiger::serialize_ascii(&aig) != aiger::serialize_ascii(&p.aig) {
            unsound.push(format!("{name} passed the digest check"));
        }
        match ledger.check(&name, &aig, &p.cert, false).0 {
            Outcome::Valid => accepted(name, &aig, &mut tally, &mut unsound),
            Outcome::Invalid { .. } => *tally.entry("circuit mutant invalid").or_default() += 1,
            Outcome::Rejected(_) => *tally.entry("circuit mutant rejected").or_default() += 1,
        }
    }
    let detail = format!(
        "{CERT_TAMPERS} certificate and {CIRCUIT_TAMPERS} circuit mutations over {} instances: {}{}",
        pool.len(),
        tally.iter().map(|(k, v)| format!("{v} {k}")).collect::<Vec<_>>().join(", "),
        if unsound.is_empty() { String::new() } else { format!("; ACCEPTED BUT UNSAFE: {}", unsound.join(", ")) }
    );
    verdict(5, "tamper-proofness", unsound.is_empty(), detail)
}

fn criterion_6(ledger: &Ledger) -> Line {
    let ok = ledger.bad_traces.is_empty() && ledger.bad_witnesses.is_empty() && ledger.traces > 0 && ledger.witnesses > 0;
    let mut detail = format!(
        "{}/{} counterexample traces replay to bad, {}/{} invalidity witnesses satisfy their query",
        ledger.traces - ledger.bad_traces.len(),
        ledger.traces,
        ledger.witnesses - ledger.bad_witnesses.len(),
        ledger.witnesses
    );
    for bad in ledger.bad_traces.iter().chain(&ledger.bad_witnesses) {
        detail += &format!("; failed: {bad}");
    }
    verdict(6, "counterexample validity", ok, detail)
}

fn criterion_7(ledger: &Ledger) -> Line {
    let mut detail = format!("{} checks, {} split/tseitin disagreements", ledger.checks, ledger.strategy_disagreements.len());
    for d in &ledger.strategy_disagreements {
        detail += &format!("; {d}");
    }
    verdict(7, "strategy agreement", ledger.strategy_disagreements.is_empty() && ledger.checks > 0, detail)
}

fn criterion_8(ledger: &mut Ledger) -> Line {
    const TITLE: &str = "external AIGER instances";
    let Some(dir) = std::env::var_os("PCH_EXTERNAL_AIGER_DIR").map(PathBuf::from) else {
        return Line { id: 8, status: "SKIP", title: TITLE, detail: "PCH_EXTERNAL_AIGER_DIR not set".into() };
    };
    let mut files: Vec<PathBuf> = match std::fs::read_dir(&dir) {
        Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|e| e == "aig")).collect(),
        Err(e) => return verdict(8, TITLE, false, format!("{}: {e}", dir.display())),
    };
    files.sort();
    let mut parts = Vec::new();
    let mut slower = Vec::new();
    let mut used = 0;
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let Ok(aig) = aiger::parse(&std::fs::read(path).unwrap_or_default()) else {
            parts.push(format!("{name} unreadable"));
            continue;
        };
        if encode(&aig, 0).is_err() {
            parts.push(format!("{name} not a single-safety instance"));
            continue;
        }
        match run_prove(&aig, EXTERNAL_PROVE_LIMIT) {
            Proof::Proved { cert, time } => {
                used += 1;
                let (outcome, q) = ledger.check(&name, &aig, &cert, true);
                if !outcome.is_valid() || q >= time {
                    slower.push(name.clone());
                }
                parts.push(format!("{name} {:.3}s/{:.3}s", time.as_secs_f64(), q.as_secs_f64()));
            }
            Proof::Cex(cex) => {
                ledger.trace(&name, &aig, &cex);
                parts.push(format!("{name} unsafe"));
            }
            Proof::Limit => parts.push(format!("{name} over budget")),
        }
    }
    if used == 0 {
        return Line { id: 8, status: "SKIP", title: TITLE, detail: format!("no provable instances: {}", parts.join(", ")) };
    }
    verdict(8, TITLE, slower.is_empty(), format!("{used} proved, check faster than prove on {}: {}", used - slower.len(), parts.join(", ")))
}

fn main() {
    let start = Instant::now();
    let mut ledger = Ledger::default();
    let mut safe = Vec::new();
    let mut lines = vec![criterion_1(&mut ledger, &mut safe)];
    let runs = multiplier_suite(&mut ledger, &mut safe);
    lines.push(criterion_2(&mut ledger, &safe));
    lines.push(criterion_3(&runs));
    lines.push(criterion_4(&runs));
    lines.push(criterion_5(&mut ledger, &safe));
    lines.push(criterion_8(&mut ledger));
    lines.push(criterion_6(&ledger));
    lines.push(criterion_7(&ledger));
    lines.sort_by_key(|l| l.id);
    println!();
    for l in &lines {
        println!("criterion {} [{}] {}: {}", l.id, l.status, l.title, l.detail);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| l.status == "FAIL").map(|l| l.id).collect();
    println!("acceptance finished in {:.1?}; failed: {failed:?}", start.elapsed());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
