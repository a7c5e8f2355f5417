//! One function per subcommand, each producing a [`Report`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use decaylab::bessel::coeff_tables;
use decaylab::cantor::{build_cantor, decay_exponent_fit, CantorSpec};
use decaylab::decay::{circle_directions, wavefront_scan, DistributionSpec, FamilyTarget, ParameterPair, ScanConfig};
use decaylab::dyadic::{
    annulus_integral, build_kernel, build_partition, knapp_family, op_norm_1_inf, op_norm_2_2, restriction_scan,
    restriction_threshold, GridSpec, KernelGrid,
};
use decaylab::fbi::{fbi_constant, fbi_numeric};
use decaylab::decay::SampledFunction;
use decaylab::index::MultiIndex;
use decaylab::quad::fit_linear;
use decaylab::sphere::{
    default_r_max_grid, exact_constant, gevrey_norm_sequence, lq_threshold, lq_threshold_scan, measure_constant,
    paper_constant, profile_order, sigma_hat_quadrature, LqClass,
};
use decaylab::bessel::f_eval;
use decaylab::verify::run_all;

use crate::output::{Cell, CheckOutcome, Manifest, Report, Table};
use crate::ExperimentConfig;

pub enum Failure {
    Usage(String),
    Compute(String),
}

impl From<decaylab::Error> for Failure {
    fn from(e: decaylab::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

/// Accumulates parameters, summary results and checks for the manifest.
struct Draft {
    parameters: BTreeMap<String, Value>,
    results: BTreeMap<String, Value>,
    checks: Vec<CheckOutcome>,
    extra: BTreeMap<String, Value>,
}

impl Draft {
    fn new() -> Self {
        Draft {
            parameters: BTreeMap::new(),
            results: BTreeMap::new(),
            checks: Vec::new(),
            extra: BTreeMap::new(),
        }
    }

    fn param(&mut self, name: &str, value: impl serde::Serialize) {
        self.parameters.insert(name.into(), json!(value));
    }

    fn result(&mut self, name: &str, value: impl serde::Serialize) {
        self.results.insert(name.into(), json!(value));
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckOutcome {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn finish(self, config: &ExperimentConfig, anchor: &str, table: Table) -> Report {
        let passed = self.checks.iter().all(|c| c.passed);
        Report {
            table,
            extra: self.extra,
            manifest: Manifest {
                tool: "decaylab",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: config.command.into(),
                anchor: anchor.into(),
                seed: config.seed,
                format: config.format,
                parameters: self.parameters,
                results: self.results,
                checks: self.checks,
                passed,
            wall_time_secs: None,
            },
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn single_q(config: &ExperimentConfig, default: f64) -> Result<f64, Failure> {
    match config.q.as_deref() {
        None => Ok(default),
        Some([q]) => Ok(*q),
        Some(_) => Err(usage(format!("{} takes a single --q", config.command))),
    }
}

pub fn run(config: &ExperimentConfig) -> Outcome {
    match config.command {
        "bessel-table" => bessel_table(config),
        "sphere-ft" => sphere_ft(config),
        "lq-scan" => lq_scan(config),
        "gevrey-fit" => gevrey_fit(config),
        "dyadic-norms" => dyadic_norms(config),
        "restriction-scan" => restriction(config),
        "salem-build" => salem_build(config),
        "salem-decay" => salem_decay(config),
        "decay-probe" => decay_probe(config),
        "fbi-check" => fbi_check(config),
        "verify-all" => verify_all(config),
        other => Err(usage(format!("unknown subcommand {other}"))),
    }
}

fn bessel_table(config: &ExperimentConfig) -> Outcome {
    let kmax = config.kmax.unwrap_or(10);
    let mut draft = Draft::new();
    draft.param("kmax", kmax);
    let table = coeff_tables(kmax).map_err(|e| usage(e.to_string()))?;
    let mut out = Table::new(&["j", "k", "a", "b"]);
    let mut bad = Vec::new();
    for k in 0..=kmax {
        if !(table.a(k, k) == &1u32.into() && table.b(k, k) == &1u32.into()) {
            bad.push(format!("diagonal at k = {k}"));
        }
        if k >= 1 && table.a(0, k) != table.b(0, k - 1) {
            bad.push(format!("a_0{k} != b_0{}", k - 1));
        }
        for j in 0..=k {
            out.push(vec![
                j.into(),
                k.into(),
                Cell::Int(table.a(j, k).to_string()),
                Cell::Int(table.b(j, k).to_string()),
            ]);
        }
    }
    draft.check("table identities", bad.is_empty(), bad.join("; "));
    let v = table.to_json();
    draft.extra.insert("a".into(), v["a"].clone());
    draft.extra.insert("b".into(), v["b"].clone());
    Ok(draft.finish(config, "exact recurrence for the derivatives of J_m(r)/r^m", out))
}

fn sphere_ft(config: &ExperimentConfig) -> Outcome {
    let d = config.d.unwrap_or(3);
    if !(2..=3).contains(&d) {
        return Err(usage("sphere-ft supports d = 2 or 3"));
    }
    let mut draft = Draft::new();
    draft.param("d", d);
    let m = profile_order(d);
    let mut out = Table::new(&["rho", "closed_form", "paper_closed_form", "quadrature"]);
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let rho = i as f64 * 0.5;
        let closed = exact_constant(d) * f_eval(m, rho)?;
        let paper = paper_constant(d) * f_eval(m, rho)?;
        let mut xi = vec![0.0; d];
        xi[0] = rho;
        let quad = sigma_hat_quadrature(&xi, 64)?;
        worst = worst.max((quad - Complex64::new(closed, 0.0)).norm());
        out.push(vec![rho.into(), closed.into(), paper.into(), quad.re.into()]);
    }
    let measured = measure_constant(d, 32, 20.0, config.seed)?;
    draft.result("measured_constant", measured.constant);
    draft.result("relative_spread", measured.relative_spread);
    draft.result("exact_constant", exact_constant(d));
    draft.result("paper_constant", paper_constant(d));
    draft.result("max_quadrature_error", worst);
    draft.check(
        "quadrature matches (2 pi)^{d/2} f_{(d-2)/2}",
        worst < 1e-9 && (measured.constant / exact_constant(d) - 1.0).abs() < 1e-9,
        format!("max error {worst:e}, measured constant {}", measured.constant),
    );
    Ok(draft.finish(config, "closed form of the sphere's Fourier transform", out))
}

fn lq_scan(config: &ExperimentConfig) -> Outcome {
    let d = config.d.unwrap_or(2);
    if d < 2 {
        return Err(usage("lq-scan needs d >= 2"));
    }
    let threshold = lq_threshold(d);
    let qs = config
        .q
        .clone()
        .unwrap_or_else(|| vec![threshold - 1.0, threshold - 0.5, threshold + 0.5, threshold + 1.0, threshold + 2.0]);
    let mut draft = Draft::new();
    draft.param("d", d);
    draft.param("q", &qs);
    draft.result("threshold", threshold);
    let rows = lq_threshold_scan(d, &qs, &default_r_max_grid())?;
    let mut out = Table::new(&[
        "d",
        "q",
        "classification",
        "predicted",
        "growth_exponent",
        "predicted_exponent",
        "r_squared",
    ]);
    let mut wrong = Vec::new();
    for row in &rows {
        let predicted = if row.q > threshold {
            LqClass::Convergent
        } else {
            LqClass::Divergent
        };
        if row.classification != predicted {
            wrong.push(format!("q = {}: {}", row.q, row.classification));
        }
        out.push(vec![
            d.into(),
            row.q.into(),
            row.classification.to_string().into(),
            predicted.to_string().into(),
            row.growth_exponent.into(),
            row.predicted_exponent.into(),
            row.r_squared.into(),
        ]);
    }
    draft.check("classification matches q > 2d/(d-1)", wrong.is_empty(), wrong.join("; "));
    Ok(draft.finish(config, "L^q integrability threshold 2d/(d-1) of the sphere transform", out))
}

fn gevrey_fit(config: &ExperimentConfig) -> Outcome {
    let d = config.d.unwrap_or(2);
    let q = single_q(config, 5.0)?;
    let kmax = config.kmax.unwrap_or(8);
    let mut draft = Draft::new();
    draft.param("d", d);
    draft.param("q", q);
    draft.param("kmax", kmax);
    let table = coeff_tables(kmax.max(1))?;
    let fit = gevrey_norm_sequence(d, q, kmax, &table).map_err(|e| usage(e.to_string()))?;
    let mut out = Table::new(&["k", "norm", "ratio"]);
    for (k, norm) in fit.norms.iter().enumerate() {
        let ratio = if k == 0 { f64::NAN } else { fit.ratios[k - 1] };
        out.push(vec![k.into(), (*norm).into(), ratio.into()]);
    }
    draft.result("s", fit.s);
    draft.result("A", fit.a);
    draft.result("C", fit.c);
    draft.check("Gevrey order at most 1", fit.s <= 1.15, format!("fitted s = {}", fit.s));
    Ok(draft.finish(config, "L^q norms of derivatives grow like C A^k k^k", out))
}

fn dyadic_norms(config: &ExperimentConfig) -> Outcome {
    let d = config.d.unwrap_or(2);
    if !(2..=3).contains(&d) {
        return Err(usage("dyadic-norms supports d = 2 or 3"));
    }
    let alpha = MultiIndex::new(config.alpha.clone().unwrap_or_else(|| vec![0; d])).map_err(|e| usage(e.to_string()))?;
    if alpha.dim() != d {
        return Err(usage(format!("--alpha must have {d} entries")));
    }
    let kmax = config.kmax.unwrap_or(12);
    if !(7..=14).contains(&kmax) {
        return Err(usage("dyadic-norms needs 7 <= kmax <= 14"));
    }
    let mut draft = Draft::new();
    draft.param("d", d);
    draft.param("alpha", alpha.entries());
    draft.param("kmax", kmax);
    let partition = build_partition(d, kmax)?;
    let mut out = Table::new(&["k", "op_norm_1_inf", "annulus_integral", "op_norm_2_2"]);
    let (mut lk, mut l1, mut la, mut l2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in 4..=kmax {
        let kernel = build_kernel(&partition, &alpha, k, KernelGrid::default())?;
        let n1 = op_norm_1_inf(&kernel);
        let ann = annulus_integral(d, k as u32, 10)?;
        let n2 = op_norm_2_2(d, &alpha, k, 8)?.value;
        out.push(vec![k.into(), n1.into(), ann.into(), n2.into()]);
        lk.push(k as f64);
        l1.push(n1.log2());
        la.push(ann.log2());
        l2.push(n2.log2());
    }
    let n = lk.len();
    let s1 = fit_linear(&lk, &l1, 0..n)?.slope;
    let sa = fit_linear(&lk, &la, 0..n)?.slope;
    let s2 = fit_linear(&lk, &l2, 0..n)?.slope;
    let half = (d as f64 - 1.0) / 2.0;
    draft.result("slope_1_inf", s1);
    draft.result("slope_annulus", sa);
    draft.result("slope_2_2", s2);
    draft.check("L1->Linf slope -(d-1)/2", (s1 + half).abs() <= 0.07, format!("slope {s1}"));
    draft.check("annulus slope -(d-1)", (sa + 2.0 * half).abs() <= 0.05, format!("slope {sa}"));
    draft.check("L2->L2 slope at most 1", s2 <= 1.1, format!("slope {s2}"));
    Ok(draft.finish(config, "dyadic decomposition bounds for the sphere transform", out))
}

fn restriction(config: &ExperimentConfig) -> Outcome {
    let ps = config.p.clone().unwrap_or_else(|| vec![1.1, 1.35]);
    let refinements = config.depth.unwrap_or(4) as usize;
    let mut draft = Draft::new();
    draft.param("p", &ps);
    draft.param("depth", refinements);
    let threshold = restriction_threshold(2)?;
    draft.result("threshold", threshold);
    let family = knapp_family(refinements);
    let est = restriction_scan(&ps, &family, GridSpec::default()).map_err(|e| usage(e.to_string()))?;
    let mut out = Table::new(&["p", "trial", "ratio", "lp_norm", "restricted_l2_norm"]);
    for e in &est {
        for t in &e.trials {
            out.push(vec![
                e.p.into(),
                t.label.clone().into(),
                t.ratio.into(),
                t.lp_norm.into(),
                t.restricted_l2_norm.into(),
            ]);
        }
        let ratios: Vec<f64> = e.trials.iter().map(|t| t.ratio).collect();
        if e.p < threshold {
            let ok = ratios.iter().all(|&r| r <= ratios[0] * (1.0 + 1e-9));
            draft.check(&format!("p = {} bounded", e.p), ok, format!("ratios {ratios:?}"));
        } else if e.p > threshold {
            let ok = ratios.windows(2).all(|w| w[1] > w[0]);
            draft.check(&format!("p = {} increasing", e.p), ok, format!("ratios {ratios:?}"));
        }
    }
    Ok(draft.finish(config, "restriction to the circle holds exactly for p < 6/5", out))
}

struct MeasureChoice {
    spec: CantorSpec,
    ks: (i32, i32),
    name: &'static str,
}

fn measure_choice(config: &ExperimentConfig) -> Result<MeasureChoice, Failure> {
    let name = config.measure.as_deref().unwrap_or("middle-thirds");
    let (spec, ks, name) = match name {
        "middle-thirds" => (CantorSpec::middle_thirds(config.depth.unwrap_or(10)), (3, 12), "middle-thirds"),
        "uniform" => (CantorSpec::uniform(config.depth.unwrap_or(14)), (2, 10), "uniform"),
        "random" => (CantorSpec::random_half(config.depth.unwrap_or(3), config.seed), (6, 13), "random"),
        other => return Err(usage(format!("unknown measure {other:?}"))),
    };
    Ok(MeasureChoice { spec, ks, name })
}

fn salem_build(config: &ExperimentConfig) -> Outcome {
    let choice = measure_choice(config)?;
    let mut draft = Draft::new();
    draft.param("measure", choice.name);
    draft.param("depth", choice.spec.depth);
    let mu = build_cantor(&choice.spec).map_err(|e| usage(e.to_string()))?;
    let mut out = Table::new(&["index", "atom", "mass"]);
    for (i, (x, w)) in mu.atoms.iter().zip(&mu.masses).enumerate() {
        out.push(vec![i.into(), (*x).into(), (*w).into()]);
    }
    let total = mu.total_mass();
    draft.result("atoms", mu.atoms.len());
    draft.result("dimension", choice.spec.dimension());
    draft.check(
        "probability measure on [0, 1]",
        (total - 1.0).abs() < 1e-12 && mu.atoms.iter().all(|x| (0.0..=1.0).contains(x)),
        format!("total mass {total}"),
    );
    Ok(draft.finish(config, "self-similar Cantor measures", out))
}

fn salem_decay(config: &ExperimentConfig) -> Outcome {
    let choice = measure_choice(config)?;
    let hi = config.kmax.map_or(choice.ks.1, |k| k as i32);
    let mut draft = Draft::new();
    draft.param("measure", choice.name);
    draft.param("depth", choice.spec.depth);
    draft.param("kmax", hi);
    let mu = build_cantor(&choice.spec).map_err(|e| usage(e.to_string()))?;
    let fit = decay_exponent_fit(&mu, choice.ks.0..hi + 1).map_err(|e| usage(e.to_string()))?;
    let mut out = Table::new(&["k", "annulus_sup"]);
    for (k, s) in fit.ks.iter().zip(&fit.sups) {
        out.push(vec![(*k as i64).into(), (*s).into()]);
    }
    draft.result("beta_hat", fit.beta_hat);
    draft.result("beta_stderr", fit.beta_stderr);
    draft.result("dimension", choice.spec.dimension());
    match choice.name {
        "middle-thirds" => draft.check("no decay", fit.beta_hat <= 0.05, format!("beta {}", fit.beta_hat)),
        "uniform" => draft.check(
            "decay like Lebesgue measure",
            (fit.beta_hat / 2.0 - 1.0).abs() <= 0.05,
            format!("beta/2 {}", fit.beta_hat / 2.0),
        ),
        // One seed is not a test of the seed average.
        _ => {}
    }
    Ok(draft.finish(config, "Fourier decay exponents of Cantor measures", out))
}

fn decay_probe(config: &ExperimentConfig) -> Outcome {
    let q = single_q(config, 2.0)?;
    let aperture = config.aperture.unwrap_or(30.0);
    let mut draft = Draft::new();
    let (spec, fourier, expected, label) = if let Some(spec) = &config.distribution_spec {
        (spec.clone(), true, None, "custom".to_string())
    } else {
        let name = config.distribution.as_deref().unwrap_or("x1");
        let (spec, fourier, expect_zero) = match name {
            "x1" => (DistributionSpec::Monomial { gamma: vec![1, 0] }, true, true),
            "one" => (DistributionSpec::ConstantOne { d: 2 }, true, true),
            "gaussian" => (
                DistributionSpec::SampledGaussian {
                    d: 2,
                    n: 33,
                    step: 0.5,
                    width: 1.0,
                },
                true,
                false,
            ),
            "delta-derivative" => (
                DistributionSpec::PointMassDerivative {
                    location: vec![0.0, 0.0],
                    gamma: vec![1, 0],
                    scale: [1.0, 0.0],
                },
                false,
                true,
            ),
            other => return Err(usage(format!("unknown distribution {other:?}"))),
        };
        (spec, fourier, Some(expect_zero), name.to_string())
    };
    draft.param("distribution", &label);
    draft.param("distribution_spec", &spec);
    draft.param("q", q);
    draft.param("aperture", aperture);
    let t = spec.build().map_err(|e| usage(e.to_string()))?;
    if t.dim() != 2 {
        return Err(usage("decay-probe scans the circle of directions, so d = 2"));
    }
    let p = ParameterPair::total_order(2, 1, q).map_err(|e| usage(e.to_string()))?;
    let w = wavefront_scan(&t, &p, &circle_directions(8), &ScanConfig::new(aperture, fourier))?;
    let mut out = Table::new(&["target", "verdict", "slope", "r_squared", "monotone"]);
    for f in &w.fits {
        out.push(vec![
            f.target.to_string().into(),
            f.verdict.to_string().into(),
            f.slope.unwrap_or(f64::NAN).into(),
            f.r_squared.unwrap_or(f64::NAN).into(),
            f.monotone.into(),
        ]);
    }
    let flagged: Vec<String> = w.flagged.iter().map(ToString::to_string).collect();
    draft.result("flagged", &flagged);
    draft.result("mode", if fourier { "fourier" } else { "direct" });
    if let Some(expect_zero) = expected {
        let want: Vec<FamilyTarget> = if expect_zero { vec![FamilyTarget::Zero] } else { vec![] };
        draft.check(
            "flagged set matches the exemplar",
            w.flagged == want && w.undecided.is_empty(),
            format!("flagged {flagged:?}, undecided {}", w.undecided.len()),
        );
    }
    Ok(draft.finish(config, "decay wavefront sets from directional test families", out))
}

fn fbi_check(config: &ExperimentConfig) -> Outcome {
    use rand::{Rng, SeedableRng};
    let d = config.d.unwrap_or(2);
    if !(1..=2).contains(&d) {
        return Err(usage("fbi-check supports d = 1 or 2"));
    }
    let mut draft = Draft::new();
    draft.param("d", d);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let mut cols: Vec<String> = Vec::new();
    for i in 0..d {
        cols.push(format!("x{i}"));
    }
    for i in 0..d {
        cols.push(format!("xi{i}"));
    }
    cols.extend(["re", "im", "x_dependence"].map(String::from));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut out = Table::new(&col_refs);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
        let xi: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
        let v = fbi_constant(&x, &xi)?;
        let dep = (v - fbi_constant(&vec![0.0; d], &xi)?).norm();
        worst = worst.max(dep);
        let mut row: Vec<Cell> = x.iter().chain(&xi).map(|&v| v.into()).collect();
        row.extend([v.re.into(), v.im.into(), dep.into()]);
        out.push(row);
    }
    let n = if d == 1 { 401 } else { 201 };
    let one = SampledFunction::from_fn(d, n, 0.1, |_| Complex64::new(1.0, 0.0))?;
    let mut numeric: f64 = 0.0;
    for _ in 0..10 {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let xi: Vec<f64> = (0..d).map(|_| rng.random_range(-6.0..6.0)).collect();
        numeric = numeric.max((fbi_numeric(&one, &x, &xi, 5.0)? - fbi_constant(&x, &xi)?).norm());
    }
    draft.result("max_x_dependence", worst);
    draft.result("numeric_difference", numeric);
    draft.check("independent of x", worst < 1e-12, format!("max {worst:e}"));
    draft.check("matches quadrature", numeric < 1e-6, format!("max {numeric:e}"));
    Ok(draft.finish(config, "FBI transform of a constant is independent of x", out))
}

fn verify_all(config: &ExperimentConfig) -> Outcome {
    let mut draft = Draft::new();
    draft.param("tier", config.tier);
    draft.param("tolerances", &config.tolerances);
    let results = run_all(config.tier, &config.tolerances, config.seed);
    let mut out = Table::new(&["id", "name", "passed", "metric", "value"]);
    for r in &results {
        for m in &r.metrics {
            out.push(vec![r.id.into(), r.name.clone().into(), r.passed.into(), m.name.clone().into(), m.value.into()]);
        }
        if r.metrics.is_empty() {
            out.push(vec![r.id.into(), r.name.clone().into(), r.passed.into(), "".into(), f64::NAN.into()]);
        }
        draft.check(&r.name, r.passed, format!("{}: {}", r.anchor, r.summary));
    }
    draft.result("passed", results.iter().filter(|r| r.passed).count());
    draft.result("total", results.len());
    Ok(draft.finish(config, "acceptance checks", out))
}
