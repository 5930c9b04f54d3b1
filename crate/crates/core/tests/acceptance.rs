//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest
//! harness so every line is printed; exits nonzero if any criterion fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tidd::bench::{bv_secret, Algo};
use tidd::linalg::MatrixTidd;
use tidd::oracle::{
    class_count_at_level, class_counts, conjunctive_row_class_count, dense_distribution, dense_from_matrix,
    dense_from_tidd, dense_matmul, dense_matrix, exhaustive_equiv, DenseFunction, Expr,
};
use tidd::{BinaryOp, Manager, Tidd, Value};

/// Oracle scale used by the suite (variables).
const ORACLE_VARS: usize = 16;

/// Structural health of every diagram seen: validation plus idempotent reduction.
#[derive(Default)]
struct Health {
    seen: HashSet<Tidd>,
    checked: usize,
    failures: Vec<String>,
}

impl Health {
    /// Diagrams from a different manager may reuse handles.
    fn new_scope(&mut self) {
        self.seen.clear();
    }

    fn check(&mut self, m: &mut Manager, t: &Tidd) {
        if !self.seen.insert(t.clone()) {
            return;
        }
        self.checked += 1;
        let report = m.validate(t);
        if !report.is_pass() {
            self.failures.push(format!("{report:?} on {t:?}"));
        }
        if &m.reduce_tidd(t) != t {
            self.failures.push(format!("reduce not idempotent on {t:?}"));
        }
    }
}

/// Everything built by criteria 1–5, for the minimality and path-count sweeps.
struct Shared {
    m: Manager,
    built: Vec<Tidd>,
    built_set: HashSet<Tidd>,
}

impl Shared {
    fn record(&mut self, t: &Tidd, health: &mut Health) {
        health.check(&mut self.m, t);
        if self.built_set.insert(t.clone()) {
            self.built.push(t.clone());
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn stack_counts(m: &Manager, t: &Tidd) -> Vec<usize> {
    m.stack(t.top()).iter().rev().map(|&id| m.layer(id).num_states()).collect()
}

fn c1_hadamard(s: &mut Shared, h: &mut Health) -> Outcome {
    let mut edges = Vec::new();
    for i in 1..=16u32 {
        let f = s.m.hadamard_family(i).unwrap();
        s.record(&f, h);
        let size = s.m.size_metrics(&f);
        if size.states != 2 * i as usize + 2 {
            return outcome(false, format!("H level {i}: {} states, expected {}", size.states, 2 * i + 2));
        }
        edges.push(size.edges);
    }
    let slope4 = edges.windows(2).all(|w| w[1] - w[0] == 4);
    outcome(
        slope4,
        format!("states 2i+2 for i=1..16; edges {}..{} (step {})", edges[0], edges[15], edges[1] - edges[0]),
    )
}

fn c2_equality(s: &mut Shared, h: &mut Health) -> Outcome {
    for l in 1..=16u32 {
        let f = s.m.equality_relation(l).unwrap();
        s.record(&f, h);
        let states = s.m.size_metrics(&f).states;
        if states != 2 * l as usize + 2 {
            return outcome(false, format!("EQ level {l}: {states} states"));
        }
    }
    outcome(true, "states 2l+2 for l=1..16")
}

fn c3_anti_diagonal(s: &mut Shared, h: &mut Health) -> Outcome {
    let mut notes = Vec::new();
    for n in [2usize, 4, 8] {
        let lvl = n.trailing_zeros();
        let prefixes = s.m.anti_diagonal_prefixes(n).unwrap();
        let mut prev = 0usize;
        for (step, f) in prefixes.iter().enumerate() {
            s.record(f, h);
            let count = stack_counts(&s.m, f)[lvl as usize];
            // Conjunct i constrains bit n-1-i of row i.
            let oracle_rows = conjunctive_row_class_count(n, |i, r| i > step || !r[n - 1 - i]).unwrap();
            if count != oracle_rows {
                return outcome(false, format!("n={n} prefix {step}: {count} states vs row oracle {oracle_rows}"));
            }
            if n * n <= ORACLE_VARS {
                let d = dense_from_tidd(&s.m, f).unwrap();
                let dense = class_count_at_level(&d, lvl).unwrap();
                if dense != count {
                    return outcome(false, format!("n={n} prefix {step}: {count} states vs dense oracle {dense}"));
                }
            }
            if step > 0 && count < 2 * prev {
                return outcome(false, format!("n={n}: prefix {step} has {count} < 2·{prev} states"));
            }
            prev = count;
        }
        if prev < 1 << n {
            return outcome(false, format!("n={n}: {prev} < 2^{n} states"));
        }
        notes.push(format!("h_{n}: {prev}"));
    }
    outcome(true, format!("level-log n states {} (= 2^n, oracle-matched, doubling per conjunct)", notes.join(", ")))
}

fn c4_pointwise(s: &mut Shared, h: &mut Health) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut passed = 0;
    let mut total = 0;
    for vars in [4usize, 8, 16] {
        let level = vars.trailing_zeros();
        for _ in 0..100 {
            let e = Expr::random(&mut rng, vars, 5);
            let mut seen = Vec::new();
            let f = e.build(&mut s.m, level, &mut |_, t| seen.push(t.clone())).unwrap();
            for t in &seen {
                s.record(t, h);
            }
            total += 1;
            passed += exhaustive_equiv(&s.m, &f, &e.dense(level).unwrap()).unwrap() as usize;
        }
    }
    outcome(passed == total, format!("{passed}/{total} random expression trees at 4, 8, 16 variables"))
}

/// Folds `terms` with `op` along a random binary tree over a shuffled order.
fn random_fold(m: &mut Manager, op: &BinaryOp, terms: &[Tidd], rng: &mut ChaCha8Rng, out: &mut Vec<Tidd>) -> Tidd {
    let mut pool: Vec<Tidd> = terms.to_vec();
    pool.shuffle(rng);
    while pool.len() > 1 {
        let i = rng.gen_range(0..pool.len() - 1);
        let (a, b) = (pool.remove(i), pool.remove(i));
        let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        let c = m.apply(op, &a, &b).unwrap();
        out.push(c.clone());
        pool.insert(i, c);
    }
    pool.pop().unwrap()
}

fn c5_canonicity(s: &mut Shared, h: &mut Health) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ops = [BinaryOp::AND, BinaryOp::OR, BinaryOp::XOR, BinaryOp::PLUS, BinaryOp::TIMES];
    let mut equal = 0;
    for _ in 0..100 {
        let level = rng.gen_range(2..=4u32);
        let vars = 1usize << level;
        let op = ops[rng.gen_range(0..ops.len())];
        let k = rng.gen_range(3..=8);
        let t = s.m.true_tidd(level);
        let terms: Vec<Tidd> = (0..k)
            .map(|_| {
                let x = s.m.projection(level, rng.gen_range(0..vars)).unwrap();
                if rng.gen_bool(0.5) {
                    s.m.apply(&BinaryOp::XOR, &x, &t).unwrap()
                } else {
                    x
                }
            })
            .collect();
        let mut made = terms.clone();
        let a = random_fold(&mut s.m, &op, &terms, &mut rng, &mut made);
        let b = random_fold(&mut s.m, &op, &terms, &mut rng, &mut made);
        for t in &made {
            s.record(t, h);
        }
        equal += s.m.equal(&a, &b) as usize;
    }
    outcome(equal == 100, format!("{equal}/100 shuffled fold orders give identical handles"))
}

fn c6_minimality(s: &mut Shared) -> Outcome {
    let mut checked = 0;
    for t in s.built.clone() {
        if t.num_vars() > ORACLE_VARS {
            continue;
        }
        let d = dense_from_tidd(&s.m, &t).unwrap();
        let want = class_counts(&d).unwrap();
        let got = stack_counts(&s.m, &t);
        if want != got {
            return outcome(false, format!("{t:?}: per-level states {got:?}, oracle classes {want:?}"));
        }
        checked += 1;
    }
    outcome(true, format!("per-level states equal oracle class counts on {checked} diagrams"))
}

fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<Value>> {
    (0..dim)
        .map(|_| (0..dim).map(|_| Value::from_int(rng.gen_range(-3..=3))).collect())
        .collect()
}

/// 3-qubit matrices are padded with an idle fourth qubit: `A ⊗ I₂`.
fn pad(a: &[Vec<Value>], qubits: usize) -> (Vec<Vec<Value>>, usize) {
    let padded = qubits.next_power_of_two();
    let extra = 1usize << (padded - qubits);
    let dim = a.len() * extra;
    let mut out = vec![vec![Value::zero(); dim]; dim];
    for (r, row) in a.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            for k in 0..extra {
                out[r * extra + k][c * extra + k] = v.clone();
            }
        }
    }
    (out, padded)
}

fn c7_matmul(h: &mut Health) -> Outcome {
    let mut m = Manager::new();
    h.new_scope();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = 0;
    for case in 0..100 {
        let qubits = 1 + case % 3;
        let dim = 1usize << qubits;
        let (a, b) = (random_matrix(&mut rng, dim), random_matrix(&mut rng, dim));
        let (pa, padded) = pad(&a, qubits);
        let (pb, _) = pad(&b, qubits);
        let (da, db) = (dense_from_matrix(&pa).unwrap(), dense_from_matrix(&pb).unwrap());
        let level = da.level();
        let ta = MatrixTidd::new(m.from_truth_table(level, da.outputs()).unwrap(), padded).unwrap();
        let tb = MatrixTidd::new(m.from_truth_table(level, db.outputs()).unwrap(), padded).unwrap();
        let prod = m.matmul(&ta, &tb).unwrap();
        for t in [&ta.t, &tb.t, &prod.t] {
            h.check(&mut m, t);
        }
        let want = dense_matmul(&da, &db).unwrap();
        let entrywise = exhaustive_equiv(&m, &prod.t, &want).unwrap();
        // The unpadded product sits in the block with the idle qubit at 0.
        let got = dense_matrix(&dense_from_tidd(&m, &prod.t).unwrap()).unwrap();
        let extra = got.len() / dim;
        let block = (0..dim).all(|r| {
            (0..dim).all(|c| {
                let v = (0..dim).fold(Value::zero(), |acc, k| acc + &a[r][k] * &b[k][c]);
                got[r * extra][c * extra] == v
            })
        });
        let id = m.identity_matrix(padded).unwrap();
        let laws = m.matmul(&id, &ta).unwrap() == ta && m.matmul(&ta, &id).unwrap() == ta;
        ok += (entrywise && block && laws) as usize;
    }
    let h2 = MatrixTidd::new(m.hadamard_family(1).unwrap(), 1).unwrap();
    let sq = m.matmul(&h2, &h2).unwrap();
    let id = m.identity_matrix(1).unwrap();
    let two_i = m.scalar_multiply(&Value::from_int(2), &id.t);
    let h2_ok = sq.t == two_i;
    h.check(&mut m, &sq.t);
    outcome(
        ok == 100 && h2_ok,
        format!("{ok}/100 random products exact with identity laws; H_2·H_2 = 2I: {h2_ok}"),
    )
}

fn c8_kronecker(s: &mut Shared, h: &mut Health) -> Outcome {
    for i in 1..=6u32 {
        let hi = s.m.hadamard_family(i).unwrap();
        let k = s.m.kronecker(&hi, &hi).unwrap();
        s.record(&k, h);
        if k != s.m.hadamard_family(i + 1).unwrap() {
            return outcome(false, format!("H({i}) ⊗ H({i}) differs from H({})", i + 1));
        }
    }
    outcome(true, "kronecker(H(i), H(i)) = H(i+1) for i = 1..6")
}

fn c9_path_counts(s: &mut Shared) -> Outcome {
    let mut checked = 0;
    for t in s.built.clone() {
        if t.level() > 6 {
            continue;
        }
        let counts = s.m.path_counts(&t);
        let sum: BigUint = counts.top().iter().sum();
        if sum != BigUint::from(1u32) << t.num_vars() {
            return outcome(false, format!("{t:?}: top counts sum to {sum}"));
        }
        checked += 1;
    }
    let h2 = s.m.hadamard_family(1).unwrap();
    let eq4 = s.m.equality_relation(2).unwrap();
    let n = |x: u32| BigUint::from(x);
    let h2_ok = s.m.path_counts(&h2).top() == [n(3), n(1)];
    let eq_ok = s.m.path_counts(&eq4).top() == [n(4), n(12)];
    outcome(
        h2_ok && eq_ok,
        format!("top counts sum to 2^(2^l) on {checked} diagrams; H_2 (3,1): {h2_ok}; EQ_4 (4,12): {eq_ok}"),
    )
}

fn c10_sampling(h: &mut Health) -> Outcome {
    let mut m = Manager::new();
    h.new_scope();
    let mut rng = ChaCha8Rng::seed_from_u64(10);

    let eq = m.equality_relation(2).unwrap();
    h.check(&mut m, &eq);
    let exact = dense_distribution(&DenseFunction::from_fn(2, |b| Value::from_bool(b[0] == b[1] && b[2] == b[3])).unwrap())
        .unwrap();
    let sampler = m.sampler(&eq).unwrap();
    let shots = 10_000;
    let mut hist = [0usize; 16];
    for _ in 0..shots {
        let a = sampler.sample(&mut rng);
        hist[a.iter().fold(0, |acc, &b| (acc << 1) | b as usize)] += 1;
    }
    let tv: f64 = hist
        .iter()
        .zip(&exact)
        .map(|(&c, p)| (c as f64 / shots as f64 - p).abs())
        .sum::<f64>()
        / 2.0;
    let eq_ok = tv <= 0.05;

    let (ghz, _) = m.run_benchmark(Algo::Ghz, 8, 0).unwrap();
    h.check(&mut m, ghz.tidd());
    let hist = m.measure_distribution(&ghz, shots, &mut rng).unwrap();
    let frac = |k: &str| *hist.get(k).unwrap_or(&0) as f64 / shots as f64;
    let (f0, f1) = (frac("00000000"), frac("11111111"));
    let ghz_ok = hist.len() == 2 && (0.45..=0.55).contains(&f0) && (0.45..=0.55).contains(&f1);

    let seed = 10;
    let s: String = bv_secret(8, seed).iter().map(|&b| if b { '1' } else { '0' }).collect();
    let (bv, _) = m.run_benchmark(Algo::Bv, 8, seed).unwrap();
    h.check(&mut m, bv.tidd());
    let hist = m.measure_distribution(&bv, 100, &mut rng).unwrap();
    let bv_ok = hist.get(&s) == Some(&100);

    outcome(
        eq_ok && ghz_ok && bv_ok,
        format!("EQ_4 TV {tv:.4}; GHZ(8) {f0:.3}/{f1:.3}; BV(8, s={s}) {}/100", hist.get(&s).unwrap_or(&0)),
    )
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let alpha = sxy / sxx;
    (alpha, my - alpha * mx)
}

fn c11_trends(h: &mut Health) -> Outcome {
    let mut m = Manager::new();
    h.new_scope();
    let mut observe = |m: &mut Manager, t: &Tidd| h.check(m, t);
    let mut ks = Vec::new();
    let mut totals = Vec::new();
    let mut ghz_flat = true;
    for k in 6..=12u32 {
        let n = 1usize << k;
        let gates = tidd::bench::benchmark_circuit(Algo::Ghz, n, 0).unwrap();
        let init = m.vector_from_basis_state(n, &vec![false; n]).unwrap();
        let (_, r) = m.run_circuit_observed(&gates, &init, &mut observe).unwrap();
        ks.push(k as f64);
        totals.push(r.final_size.total as f64);
        ghz_flat &= r.max_intermediate_size <= 10 * r.final_size.total;
    }
    let (alpha, beta) = linear_fit(&ks, &totals);
    let affine = ks
        .iter()
        .zip(&totals)
        .all(|(k, y)| (y - (alpha * k + beta)).abs() < 0.1 * y);

    let mut dj = Vec::new();
    for n in [2usize, 4, 8, 16] {
        let mut m = Manager::new();
        h.new_scope();
        let mut observe = |m: &mut Manager, t: &Tidd| h.check(m, t);
        let gates = tidd::bench::benchmark_circuit(Algo::Dj, n, 0).unwrap();
        let init = m.vector_from_basis_state(n, &vec![false; n]).unwrap();
        let (_, r) = m.run_circuit_observed(&gates, &init, &mut observe).unwrap();
        dj.push(r.max_intermediate_size);
    }
    let ratios: Vec<f64> = dj.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    let consecutive = ratios.windows(2).any(|w| w[0] >= 2.0 && w[1] >= 2.0);
    outcome(
        affine && consecutive && ghz_flat,
        format!(
            "GHZ totals {:?} ≈ {alpha:.2}·k + {beta:.1}; DJ max {:?} (ratios {:?}); GHZ max ≤ 10× final: {ghz_flat}",
            totals.iter().map(|t| *t as usize).collect::<Vec<_>>(),
            dj,
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    )
}

fn main() -> ExitCode {
    let mut health = Health::default();
    let mut shared = Shared {
        m: Manager::new(),
        built: Vec::new(),
        built_set: HashSet::new(),
    };
    let mut results: Vec<(u32, &str, Outcome, Duration, Option<Duration>)> = Vec::new();
    let secs = Duration::from_secs;

    macro_rules! run {
        ($n:expr, $name:expr, $limit:expr, $body:expr) => {{
            let start = Instant::now();
            let o = $body;
            let elapsed = start.elapsed();
            results.push(($n, $name, o, elapsed, $limit));
            let (n, name, o, elapsed, limit) = results.last().unwrap();
            let in_time = limit.map_or(true, |l| elapsed <= &l);
            println!(
                "[{}] criterion {n:>2} {name}: {} ({:.2}s{})",
                if o.pass && in_time { "PASS" } else { "FAIL" },
                o.detail,
                elapsed.as_secs_f64(),
                limit.map_or(String::new(), |l| format!(" / limit {}s", l.as_secs_f64()))
            );
        }};
    }

    run!(1, "hadamard sizes", Some(secs(1)), c1_hadamard(&mut shared, &mut health));
    run!(2, "equality sizes", Some(secs(1)), c2_equality(&mut shared, &mut health));
    run!(3, "anti-diagonal blow-up", Some(secs(60)), c3_anti_diagonal(&mut shared, &mut health));
    run!(4, "oracle pointwise equivalence", Some(secs(120)), c4_pointwise(&mut shared, &mut health));
    run!(5, "canonicity", None, c5_canonicity(&mut shared, &mut health));
    run!(8, "kronecker", None, c8_kronecker(&mut shared, &mut health));
    run!(6, "minimality", None, c6_minimality(&mut shared));
    run!(9, "path counting", None, c9_path_counts(&mut shared));
    run!(7, "matrix multiplication", Some(secs(30)), c7_matmul(&mut health));
    run!(10, "sampling", Some(secs(30)), c10_sampling(&mut health));
    run!(11, "benchmark trends", Some(secs(600)), c11_trends(&mut health));
    let health_ok = health.failures.is_empty();
    run!(
        12,
        "structural health",
        None,
        outcome(
            health_ok,
            if health_ok {
                format!("validate + idempotent reduce on {} diagrams", health.checked)
            } else {
                format!("{} failures, first: {}", health.failures.len(), health.failures[0])
            }
        )
    );

    let failed: Vec<u32> = results
        .iter()
        .filter(|(_, _, o, e, l)| !o.pass || l.is_some_and(|l| *e > l))
        .map(|r| r.0)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
