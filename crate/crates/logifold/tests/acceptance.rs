//! Acceptance suite. Run with
//! `cargo test -p logifold --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use logifold::commands::{combine, CombineArgs};
use logifold::table::{format_tsv, TSV_HEADER};
use logifold_core::ensemble::FnSource;
use logifold_core::theory::{
    agreement_measure, check_proof_quantities, consistency, random_consistent_family, search_max_agreement,
    theory_report, Dyadic, Rational, SearchConfig, SearchMode, StepFunction,
};
use logifold_core::{
    compile_mlp, compile_mlp_fuzzy, Activation, AffineMap, Chart, Discovery, GlobalLabelSpace, Head, Logifold, MlpSpec,
    ThresholdLadder,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NETWORKS: u64 = 20;
const CRISP_POINTS: usize = 10_000;
const BOUNDARY_MARGIN: f64 = 1e-9;
const FUZZY_POINTS: usize = 1_000;
const FUZZY_TOLERANCE: f64 = 1e-9;
const FAMILIES: usize = 200;
const INSTANCES: usize = 10_000;
const LABELS: usize = 10;
const WEAK_CHARTS: usize = 6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

// ---- independent oracles -------------------------------------------------

/// Weights `(w[out][in], b[out])` per layer, drawn from U(-1, 1).
type Net = Vec<(Vec<Vec<f64>>, Vec<f64>)>;

fn random_net(seed: u64) -> Net {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden = 3 + (seed as usize % 6);
    let out = 2 + (seed as usize % 3);
    [(2, hidden), (hidden, out)]
        .iter()
        .map(|&(i, o)| {
            let w = (0..o).map(|_| (0..i).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let b = (0..o).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (w, b)
        })
        .collect()
}

fn to_spec(net: &Net, head: Head) -> MlpSpec {
    let layers = net.iter().map(|(w, b)| AffineMap::from_rows(w, b.clone()).unwrap()).collect();
    MlpSpec::new(2, layers, Activation::Relu, head).unwrap()
}

fn affine(w: &[Vec<f64>], b: &[f64], x: &[f64]) -> Vec<f64> {
    w.iter().zip(b).map(|(row, bi)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + bi).collect()
}

/// Logits and the smallest distance of any decider coordinate from 0.
fn forward(net: &Net, x: &[f64]) -> (Vec<f64>, f64) {
    let mut margin = f64::INFINITY;
    let mut h = x.to_vec();
    for (l, (w, b)) in net.iter().enumerate() {
        h = affine(w, b, &h);
        if l + 1 < net.len() {
            margin = h.iter().fold(margin, |m, v| m.min(v.abs()));
            h.iter_mut().for_each(|v| *v = v.max(0.0));
        }
    }
    for i in 0..h.len() {
        for j in i + 1..h.len() {
            margin = margin.min((h[i] - h[j]).abs());
        }
    }
    (h, margin)
}

fn first_max(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn softmax_oracle(v: &[f64]) -> Vec<f64> {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

// ---- synthetic logifold ---------------------------------------------------

struct Synthetic {
    truth: Vec<usize>,
    strong: Vec<Vec<f64>>,
    weak: Vec<Vec<Vec<f64>>>,
}

/// Puts `top` on `label` and spreads the rest evenly.
fn peaked(label: usize, top: f64) -> Vec<f64> {
    let mut row = vec![(1.0 - top) / (LABELS - 1) as f64; LABELS];
    row[label] = top;
    row
}

/// One strong chart right 90% of the time (certainty ≥ 0.9 when right,
/// 0.4..0.6 when wrong) and six weak charts right 55% of the time with
/// moderate certainty 0.3..0.5. Each instance has a confuser label the weak
/// charts share when wrong, so their errors are correlated.
fn synthetic(seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Synthetic { truth: Vec::new(), strong: Vec::new(), weak: vec![Vec::new(); WEAK_CHARTS] };
    for _ in 0..INSTANCES {
        let t = rng.gen_range(0..LABELS);
        let confuser = (t + rng.gen_range(1..LABELS)) % LABELS;
        s.truth.push(t);
        s.strong.push(if rng.gen_bool(0.9) {
            peaked(t, rng.gen_range(0.9..0.99))
        } else {
            peaked((t + rng.gen_range(1..LABELS)) % LABELS, rng.gen_range(0.4..0.6))
        });
        for w in &mut s.weak {
            let label = if rng.gen_bool(0.55) { t } else { confuser };
            w.push(peaked(label, rng.gen_range(0.3..0.5)));
        }
    }
    s
}

fn label_names() -> Vec<String> {
    (0..LABELS).map(|i| format!("y{i}")).collect()
}

fn chart(id: &str, vocab: Vec<String>, rows: Vec<Vec<f64>>) -> Chart {
    Chart::new(id, vocab, Arc::new(FnSource::new(move |i| rows.get(i).cloned()))).unwrap()
}

fn synthetic_logifold(s: &Synthetic, with_weak: bool) -> Logifold {
    let mut charts = vec![chart("strong", label_names(), s.strong.clone())];
    if with_weak {
        for (j, rows) in s.weak.iter().enumerate() {
            charts.push(chart(&format!("weak{j}"), label_names(), rows.clone()));
        }
    }
    Logifold::new(charts, GlobalLabelSpace::new(label_names()).unwrap(), ThresholdLadder::default()).unwrap()
}

// ---- criteria ------------------------------------------------------------

fn compile_forward_equivalence() -> Outcome {
    let mut checked_total = 0;
    for seed in 0..NETWORKS {
        let net = random_net(seed);
        let graph = compile_mlp(&to_spec(&net, Head::IndexMax), &Discovery::default()).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut checked = 0;
        while checked < CRISP_POINTS {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let (logits, margin) = forward(&net, &x);
            if margin <= BOUNDARY_MARGIN {
                continue;
            }
            let got = graph.evaluate(&x).map_err(|e| format!("net {seed} at {x:?}: {e}"))?;
            if got != first_max(&logits) {
                return Err(format!("net {seed} at {x:?}: graph {got}, forward {}", first_max(&logits)));
            }
            checked += 1;
        }
        checked_total += checked;
    }
    Ok(format!("{NETWORKS} networks, {checked_total} points, 0 mismatches"))
}

fn fuzzy_exactness() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..NETWORKS {
        let net = random_net(seed);
        let graph =
            compile_mlp_fuzzy(&to_spec(&net, Head::Softmax), &Discovery::default()).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        for _ in 0..FUZZY_POINTS {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let want = softmax_oracle(&forward(&net, &x).0);
            let got = graph.evaluate(&x).map_err(|e| e.to_string())?;
            for (a, b) in got.probs().iter().zip(&want) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    if worst <= FUZZY_TOLERANCE {
        Ok(format!("max |Δ| = {worst:.3e} ≤ {FUZZY_TOLERANCE:e}"))
    } else {
        Err(format!("max |Δ| = {worst:.3e} > {FUZZY_TOLERANCE:e}"))
    }
}

fn theory_exact_values() -> Outcome {
    let d = |e| Dyadic::pow2_neg(e).unwrap();
    let cases = [
        ("I_(1/2,1]", StepFunction::alternating(vec![d(1)], true).unwrap(), Rational::new(5, 6)),
        ("g = 0", StepFunction::constant(false), Rational::new(1, 3)),
        ("depth 3", StepFunction::alternating(vec![d(1), d(2), d(3)], true).unwrap(), Rational::new(23, 24)),
        ("N = 3 optimum", StepFunction::alternating((1..=5).map(d).collect(), true).unwrap(), Rational::new(95, 96)),
    ];
    for (name, g, want) in &cases {
        let got = agreement_measure(g);
        if got != *want {
            return Err(format!("{name}: {got} ≠ {want}"));
        }
    }
    let cfg = SearchConfig { depth: 8, mode: SearchMode::Exhaustive, ..SearchConfig::default() };
    let one = search_max_agreement(1, 4, &cfg).map_err(|e| e.to_string())?;
    let three = search_max_agreement(3, 4, &cfg).map_err(|e| e.to_string())?;
    if one.agreement != Rational::new(5, 6) || three.agreement != Rational::new(95, 96) {
        return Err(format!("search maxima {} and {}", one.agreement, three.agreement));
    }
    Ok("5/6, 1/3, 23/24, 95/96 exact; exhaustive N=1 K=4 depth 8 → 5/6; N=3 → 95/96".into())
}

fn proof_quantity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for f in 0..FAMILIES {
        let k = rng.gen_range(4..=8);
        let n = rng.gen_range(1..=3);
        let fam = random_consistent_family(&mut rng, k, n, 6);
        if consistency(&fam) <= Rational::new(3, 4) {
            return Err(format!("family {f} is not consistent"));
        }
        let c = check_proof_quantities(&fam).map_err(|e| e.to_string())?;
        if !c.holds() {
            return Err(format!("family {f} (K={k}, N={n}): {c:?}"));
        }
    }
    let mut lines = String::new();
    for n in 1..=3 {
        let cfg = SearchConfig { depth: 8, ..SearchConfig::default() };
        let r = theory_report(4, n, 0, &cfg).map_err(|e| e.to_string())?;
        let _ = write!(
            lines,
            "\n      N={n} K=4: max agreement {} vs claimed 1-3·2^-3N = {} ({})",
            r.search.agreement,
            r.claimed_bound,
            if r.claimed_bound_holds() { "holds" } else { "violated, informational" }
        );
    }
    Ok(format!("{FAMILIES}/{FAMILIES} families pass all applicable inequalities{lines}"))
}

fn combiner_properties() -> Outcome {
    let s = synthetic(42);
    let lf = synthetic_logifold(&s, true);
    let table = lf.evaluate_table(&s.truth).map_err(|e| e.to_string())?;
    let n: Vec<usize> = table.rows.iter().map(|r| r.n_certain).collect();
    if n.windows(2).any(|w| w[1] > w[0]) {
        return Err(format!("(a) n_certain increases: {n:?}"));
    }
    for i in 0..INSTANCES {
        let r = lf.refined_vote(i, 0.0).map_err(|e| e.to_string())?.label;
        if r != lf.simple_average(i).map_err(|e| e.to_string())? {
            return Err(format!("(b) instance {i}: refined at 0 differs from simple average"));
        }
    }
    let best = table.rows.iter().max_by(|a, b| a.acc_refined.total_cmp(&b.acc_refined)).unwrap();
    if !(best.acc_refined > table.simple_average && best.acc_refined > table.majority_vote) {
        return Err(format!(
            "(c) best refined {:.4} at {:.4} vs simple {:.4}, majority {:.4}",
            best.acc_refined, best.threshold, table.simple_average, table.majority_vote
        ));
    }
    let single = synthetic_logifold(&s, false);
    for i in 0..INSTANCES {
        let own = first_max(&s.strong[i]);
        for &t in single.ladder().thresholds() {
            let c = single.refined_vote(i, t).map_err(|e| e.to_string())?;
            if c.label != own || c.scores != s.strong[i] {
                return Err(format!("(d) instance {i} at t = {t}"));
            }
        }
        if single.simple_average(i).unwrap() != own || single.majority_vote(i).unwrap() != own {
            return Err(format!("(d) instance {i}: baselines differ from the chart"));
        }
    }
    Ok(format!(
        "(a)-(d) hold; refined {:.4} at t = {:.4} vs simple {:.4}, majority {:.4}",
        best.acc_refined, best.threshold, table.simple_average, table.majority_vote
    ))
}

fn write_matrix(dir: &std::path::Path, id: &str, rows: &[Vec<f64>]) -> PathBuf {
    let mut text = format!("# model_id={id} labels={}\n", label_names().join(","));
    for (i, row) in rows.iter().enumerate() {
        text.push_str(&format!("s:{i}"));
        for p in row {
            text.push_str(&format!(",{p:.9}"));
        }
        text.push('\n');
    }
    let path = dir.join(format!("{id}.txt"));
    std::fs::write(&path, text).unwrap();
    path
}

fn table_format() -> Outcome {
    let s = synthetic(43);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut predictions = vec![write_matrix(dir.path(), "strong", &s.strong)];
    for (j, rows) in s.weak.iter().enumerate() {
        predictions.push(write_matrix(dir.path(), &format!("weak{j}"), rows));
    }
    let truth = dir.path().join("truth.txt");
    let names = label_names();
    let truth_text: String = s.truth.iter().enumerate().map(|(i, t)| format!("s:{i},{}\n", names[*t])).collect();
    std::fs::write(&truth, truth_text).unwrap();
    let args = CombineArgs { predictions, truth, ladder: None, routing: None, out: None, seed: 0 };
    let tsv = combine(&args).map_err(|e| e.to_string())?;

    let lines: Vec<&str> = tsv.split('\n').collect();
    let ladder = ThresholdLadder::default();
    let rows = ladder.thresholds().len();
    if lines[0] != TSV_HEADER || TSV_HEADER != "threshold\tacc_refined\tacc_certain\tn_certain" {
        return Err(format!("header `{}`", lines[0]));
    }
    if lines.len() != rows + 4 || !lines[rows + 3].is_empty() {
        return Err(format!("{} lines for {rows} thresholds", lines.len()));
    }
    let decimal = |v: &str| {
        v.len() == 6 && v.as_bytes()[1] == b'.' && v.bytes().enumerate().all(|(i, c)| i == 1 || c.is_ascii_digit())
    };
    for (line, t) in lines[1..=rows].iter().zip(ladder.thresholds()) {
        let cells: Vec<&str> = line.split('\t').collect();
        let ok = cells.len() == 4
            && cells[..3].iter().all(|c| decimal(c))
            && cells[0] == format!("{t:.4}")
            && cells[3].bytes().all(|c| c.is_ascii_digit());
        if !ok {
            return Err(format!("row `{line}`"));
        }
    }
    let baseline = |line: &str, key: &str| line.split_once('\t').is_some_and(|(k, v)| k == key && decimal(v));
    if !baseline(lines[rows + 1], "simple_average") || !baseline(lines[rows + 2], "majority_vote") {
        return Err("baseline lines".into());
    }
    let n0 = lines[1].split('\t').nth(3).unwrap();
    if n0 != INSTANCES.to_string() {
        return Err(format!("threshold-0 n_certain = {n0}"));
    }
    let (lf, truth) =
        logifold::commands::build_logifold(&args.predictions, &args.truth, ladder, None).map_err(|e| e.to_string())?;
    if format_tsv(&lf.evaluate_table(&truth).map_err(|e| e.to_string())?) != tsv {
        return Err("parallel and sequential tables differ".into());
    }
    Ok(format!("{rows} rows + 2 baselines, threshold-0 n_certain = {INSTANCES}"))
}

fn routing_benefit() -> Outcome {
    let groups = ["g0", "g1", "g2"];
    let vocab = |g: usize| (0..3).map(|j| format!("c{g}{j}")).collect::<Vec<String>>();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let truth: Vec<(usize, usize)> = (0..3000).map(|_| (rng.gen_range(0..3), rng.gen_range(0..3))).collect();

    let filter_rows = truth.iter().map(|&(g, _)| (0..3).map(|k| f64::from(u8::from(k == g))).collect()).collect();
    let mut charts = vec![chart("filter", groups.iter().map(|g| g.to_string()).collect(), filter_rows)];
    for e in 0..3 {
        let rows =
            truth
                .iter()
                .map(|&(g, j)| {
                    if g == e {
                        (0..3).map(|k| if k == j { 0.9 } else { 0.05 }).collect()
                    } else {
                        vec![1.0 / 3.0; 3]
                    }
                })
                .collect();
        charts.push(chart(&format!("expert{e}"), vocab(e), rows));
    }
    let vocabs: Vec<Vec<String>> = charts.iter().map(|c| c.vocab().to_vec()).collect();
    let global = GlobalLabelSpace::union(&vocabs).unwrap();
    let truth_idx: Vec<usize> = truth.iter().map(|&(g, j)| global.index_of(&format!("c{g}{j}")).unwrap()).collect();
    let flat = Logifold::new(charts, global, ThresholdLadder::default()).unwrap();
    let map: BTreeMap<String, String> = (0..3).map(|e| (groups[e].to_string(), format!("expert{e}"))).collect();
    let routed = flat.specialize_routing("filter", &map).map_err(|e| e.to_string())?;

    let mut routed_correct = vec![0usize; routed.ladder().thresholds().len()];
    let mut flat_correct = 0;
    for (i, &t) in truth_idx.iter().enumerate() {
        for (k, &th) in routed.ladder().thresholds().iter().enumerate() {
            routed_correct[k] += usize::from(routed.refined_vote(i, th).unwrap().label == t);
        }
        flat_correct += usize::from(flat.simple_average(i).unwrap() == t);
    }
    let n = truth_idx.len();
    let flat_acc = flat_correct as f64 / n as f64;
    if routed_correct.iter().any(|&c| c != n) || flat_acc >= 1.0 {
        return Err(format!("routed {routed_correct:?}/{n}, flat {flat_acc:.4}"));
    }
    Ok(format!("routed 100% at every threshold, flat simple average {flat_acc:.4}"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("compile/forward equivalence", compile_forward_equivalence, Duration::from_secs(60)),
        ("fuzzy exactness", fuzzy_exactness, Duration::from_secs(10)),
        ("theory exact values", theory_exact_values, Duration::from_secs(60)),
        ("proof-quantity suite", proof_quantity_suite, Duration::from_secs(120)),
        ("combiner properties", combiner_properties, Duration::from_secs(30)),
        ("table format", table_format, Duration::from_secs(60)),
        ("routing", routing_benefit, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) if took <= limit => {
                println!("PASS {name} [{:.2}s ≤ {}s]: {detail}", took.as_secs_f64(), limit.as_secs())
            }
            Ok(detail) => {
                println!("FAIL {name} [{:.2}s > {}s]: {detail}", took.as_secs_f64(), limit.as_secs());
                failed.push(name);
            }
            Err(reason) => {
                println!("FAIL {name} [{:.2}s]: {reason}", took.as_secs_f64());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
