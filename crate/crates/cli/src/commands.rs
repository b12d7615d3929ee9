use std::fs;
use std::path::PathBuf;

use fracstab_core::charcore::{
    a_star, classify, oracle_roots_rational, transversality, CharTriple, StabilityKind, StabilityVerdict, DEFAULT_TOL,
};
use fracstab_core::fodesolve::{Memory, SolverOptions};
use fracstab_core::mlmodel::{
    branch_scan, coeffs_at, critical_q_roots, nondimensionalize, resting_state, simulate_neuron, special_points,
    spike_times, steady_current, DimlessParams, EquilibriumRecord, SPIKE_MIN_SEPARATION_MS, SPIKE_THRESHOLD_MV,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::{BranchArg, Cli, Command, Format};
use crate::output::{num, opt_num, svg_plot, write_sidecar, Series, Table};
use crate::{load_params, parse_duration_ms, parse_range, CliError, LoadedParams, PARAMS_ENV};

const ROOT_TOL: f64 = 1e-10;

struct Ctx {
    out: PathBuf,
    csv: bool,
    svg: bool,
    loaded: LoadedParams,
}

impl Ctx {
    fn dimless(&self) -> Result<DimlessParams, CliError> {
        Ok(nondimensionalize(&self.loaded.params)?)
    }

    fn emit(&self, stem: &str, table: &Table, svg: impl FnOnce() -> String) -> Result<(), CliError> {
        if self.csv {
            table.write(&self.out.join(format!("{stem}.csv")))?;
        }
        if self.svg {
            let path = self.out.join(format!("{stem}.svg"));
            fs::write(&path, svg()).map_err(|e| CliError::io(&path, e))?;
        }
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let env_path = std::env::var_os(PARAMS_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let mut loaded = load_params(g.params.as_deref(), env_path, &g.overrides)?;
    if let Command::Simulate { i_app, q, .. } = &cli.command {
        if let Some(i) = i_app {
            loaded.params.i_app = *i;
        }
        if let Some(q) = q {
            loaded.params.q = *q;
        }
        loaded.params.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    }
    fs::create_dir_all(&g.out).map_err(|e| CliError::io(&g.out, e))?;
    write_sidecar(&g.out, &loaded.params, &loaded.source, &g.overrides)?;
    let ctx = Ctx {
        out: g.out.clone(),
        csv: g.format.contains(&Format::Csv),
        svg: g.format.contains(&Format::Svg),
        loaded,
    };
    match &cli.command {
        Command::Classify { a, b, c, q, tol } => cmd_classify(&ctx, *a, *b, *c, q.unwrap_or(ctx.loaded.params.q), *tol),
        Command::Branches { i_range, steps } => cmd_branches(&ctx, i_range, *steps),
        Command::CriticalQ { branch, v_range, steps } => cmd_critical_q(&ctx, *branch, v_range.as_deref(), *steps),
        Command::SpecialPoints => cmd_special_points(&ctx),
        Command::Simulate {
            t_end,
            dt,
            v0,
            n0,
            corrector_iters,
            window,
            stride,
            ..
        } => cmd_simulate(
            &ctx,
            SimArgs {
                t_end: t_end.clone(),
                dt: dt.clone(),
                v0: *v0,
                n0: *n0,
                corrector_iters: *corrector_iters,
                window: *window,
                stride: *stride,
            },
        ),
        Command::HopfScan { b, c, a, v, q_range, steps } => cmd_hopf_scan(&ctx, *a, *b, *c, *v, q_range, *steps),
        Command::Verify { samples, seed } => cmd_verify(&ctx, *samples, *seed),
    }
}

fn verdict_text(v: &StabilityVerdict) -> String {
    if v.order_independent {
        format!("{} (order-independent)", v.kind)
    } else {
        v.kind.to_string()
    }
}

fn cmd_classify(ctx: &Ctx, a: f64, b: f64, c: f64, q: f64, tol: f64) -> Result<(), CliError> {
    let t = CharTriple::new(a, b, c, q)?;
    let v = classify(&t, tol)?;
    println!("{}", verdict_text(&v));
    if let Some(a_star) = v.a_star {
        println!("a* = {}", num(a_star));
    }
    let mut table = Table::new(&[
        "a", "b", "c", "q", "verdict", "order_independent", "a_star", "omega", "decay_order",
    ]);
    table.push(vec![
        num(a),
        num(b),
        num(c),
        num(q),
        v.kind.to_string(),
        v.order_independent.to_string(),
        opt_num(v.a_star),
        opt_num(v.hopf_omega),
        opt_num(v.decay_order),
    ]);
    ctx.emit("classify", &table, || {
        let qs: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
        let curve = if c > 0.0 {
            qs.iter().filter_map(|&qq| a_star(b, c, qq).ok().map(|h| (qq, h.a_star))).collect()
        } else {
            Vec::new()
        };
        svg_plot(
            &[
                Series { label: "a*".into(), points: curve },
                Series { label: "a".into(), points: vec![(qs[0], a), (1.0, a)] },
            ],
            "q",
            "a",
            "Hopf threshold",
        )
    })
}

fn record_row(i_ua: f64, r: &EquilibriumRecord, d: &DimlessParams) -> Vec<String> {
    let roots: Vec<String> = r.q_roots.iter().map(|&q| num(q)).collect();
    vec![
        num(i_ua),
        r.branch.to_string(),
        num(d.voltage_to_dim(r.v_star)),
        num(r.n_star),
        num(r.triple.a()),
        num(r.triple.b()),
        num(r.triple.c()),
        num(r.triple.q()),
        r.verdict.kind.to_string(),
        r.verdict.order_independent.to_string(),
        opt_num(r.verdict.a_star),
        opt_num(r.q_critical),
        roots.join(";"),
    ]
}

const RECORD_HEADER: [&str; 13] = [
    "I", "branch", "V", "n", "a", "b", "c", "q", "verdict", "order_independent", "a_star", "q_star", "q_roots",
];

fn cmd_branches(ctx: &Ctx, i_range: &str, steps: usize) -> Result<(), CliError> {
    let (lo, hi) = parse_range(i_range)?;
    if steps < 2 {
        return Err(CliError::Parse("--steps must be at least 2".into()));
    }
    let d = ctx.dimless()?;
    let rows = branch_scan(d.current_to_dimless(lo), d.current_to_dimless(hi), steps, &d, ROOT_TOL)?;
    let mut table = Table::new(&RECORD_HEADER);
    let mut counts = [0usize; 3];
    for row in &rows {
        table.push(record_row(d.current_to_dim(row.i_tilde), &row.record, &d));
        match row.record.verdict.kind {
            StabilityKind::AsymptoticallyStable => counts[0] += 1,
            StabilityKind::Unstable => counts[1] += 1,
            _ => counts[2] += 1,
        }
    }
    println!(
        "{} equilibria over {steps} currents: {} stable, {} unstable, {} boundary",
        rows.len(),
        counts[0],
        counts[1],
        counts[2]
    );
    ctx.emit("branches", &table, || {
        let series = ["B1", "B2", "B3"]
            .iter()
            .map(|name| Series {
                label: name.to_string(),
                points: rows
                    .iter()
                    .filter(|r| r.record.branch.as_str() == *name)
                    .map(|r| (d.current_to_dim(r.i_tilde), d.voltage_to_dim(r.record.v_star)))
                    .collect(),
            })
            .collect::<Vec<_>>();
        svg_plot(&series, "I (uA/cm2)", "V* (mV)", "Equilibrium branches")
    })
}

fn cmd_critical_q(ctx: &Ctx, branch: BranchArg, v_range: Option<&str>, steps: usize) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Parse("--steps must be at least 2".into()));
    }
    let d = ctx.dimless()?;
    let voltages: Vec<f64> = match v_range {
        Some(r) => {
            let (lo, hi) = parse_range(r)?;
            (0..steps)
                .map(|i| d.voltage_to_dimless(lo + (hi - lo) * i as f64 / (steps - 1) as f64))
                .collect()
        }
        None => {
            let g = special_points(&d, ROOT_TOL)?;
            match branch {
                BranchArg::B1 => (0..steps)
                    .map(|i| g.v_prime + (g.v_alpha - g.v_prime) * i as f64 / steps as f64)
                    .collect(),
                BranchArg::B3 => (1..=steps)
                    .map(|i| g.v_triple_prime + (g.v_double_prime - g.v_triple_prime) * i as f64 / steps as f64)
                    .collect(),
            }
        }
    };
    let mut table = Table::new(&["V", "I", "a", "b", "c", "q_star", "q_roots", "verdict"]);
    let mut curve = Vec::new();
    for &v in &voltages {
        let t = coeffs_at(v, &d)?;
        let roots = critical_q_roots(&t, ROOT_TOL)?;
        let q_star = roots.last().copied();
        if let Some(q) = q_star {
            curve.push((d.voltage_to_dim(v), q));
        }
        let verdict = classify(&t, DEFAULT_TOL)?;
        table.push(vec![
            num(d.voltage_to_dim(v)),
            num(d.current_to_dim(steady_current(v, &d))),
            num(t.a()),
            num(t.b()),
            num(t.c()),
            opt_num(q_star),
            roots.iter().map(|&q| num(q)).collect::<Vec<_>>().join(";"),
            verdict.kind.to_string(),
        ]);
    }
    println!("{} of {} voltages have a critical order", curve.len(), voltages.len());
    ctx.emit("critical_q", &table, || {
        svg_plot(
            &[Series { label: "q*".into(), points: curve.clone() }],
            "V* (mV)",
            "q*",
            "Critical fractional order",
        )
    })
}

fn cmd_special_points(ctx: &Ctx) -> Result<(), CliError> {
    let d = ctx.dimless()?;
    let g = special_points(&d, ROOT_TOL)?;
    let entries = [
        ("V_alpha", d.voltage_to_dim(g.v_alpha), "mV"),
        ("V_beta", d.voltage_to_dim(g.v_beta), "mV"),
        ("I_max", d.current_to_dim(g.i_max), "uA/cm2"),
        ("I_min", d.current_to_dim(g.i_min), "uA/cm2"),
        ("V_prime", d.voltage_to_dim(g.v_prime), "mV"),
        ("V_triple_prime", d.voltage_to_dim(g.v_triple_prime), "mV"),
        ("V_double_prime", d.voltage_to_dim(g.v_double_prime), "mV"),
    ];
    let mut table = Table::new(&["name", "value", "unit"]);
    for (name, value, unit) in entries {
        println!("{name:<15} {value:>12.6} {unit}");
        table.push(vec![name.to_string(), num(value), unit.to_string()]);
    }
    ctx.emit("special_points", &table, || {
        let lo = d.v_k - 0.1;
        let curve = (0..=600)
            .map(|i| {
                let v = lo + (1.1 - lo) * i as f64 / 600.0;
                (d.voltage_to_dim(v), d.current_to_dim(steady_current(v, &d)))
            })
            .collect();
        svg_plot(
            &[Series { label: "I_inf".into(), points: curve }],
            "V (mV)",
            "I (uA/cm2)",
            "Steady-state current",
        )
    })
}

struct SimArgs {
    t_end: String,
    dt: String,
    v0: Option<f64>,
    n0: Option<f64>,
    corrector_iters: usize,
    window: Option<usize>,
    stride: usize,
}

fn cmd_simulate(ctx: &Ctx, args: SimArgs) -> Result<(), CliError> {
    let p = &ctx.loaded.params;
    let d = nondimensionalize(p)?;
    let t_end = d.time_to_dimless(parse_duration_ms(&args.t_end)?);
    let h = d.time_to_dimless(parse_duration_ms(&args.dt)?);
    if h > t_end {
        return Err(CliError::Parse("--dt exceeds --t-end".into()));
    }
    if args.corrector_iters == 0 || args.stride == 0 {
        return Err(CliError::Parse("--corrector-iters and --stride must be positive".into()));
    }
    let rest = resting_state(&d, ROOT_TOL)?;
    let x0 = (
        args.v0.map(|v| d.voltage_to_dimless(v)).unwrap_or(rest.0),
        args.n0.unwrap_or(rest.1),
    );
    let opts = SolverOptions {
        corrector_iters: args.corrector_iters,
        memory: args.window.map_or(Memory::Full, Memory::Window),
        ..SolverOptions::default()
    };
    let traj = simulate_neuron(&d, x0, t_end, h, &opts)?;
    let ms: Vec<f64> = traj.times.iter().map(|&t| d.time_to_dim(t)).collect();
    let mv: Vec<f64> = traj.component(0).iter().map(|&v| d.voltage_to_dim(v)).collect();
    let spikes = spike_times(&ms, &mv, SPIKE_THRESHOLD_MV, SPIKE_MIN_SEPARATION_MS);

    let mut table = Table::new(&["t", "V", "n"]);
    let mut spike_table = Table::new(&["spike", "t"]);
    for (k, (time, x)) in traj.rows().enumerate() {
        if k % args.stride == 0 || k + 1 == traj.len() {
            table.push(vec![num(d.time_to_dim(time)), num(d.voltage_to_dim(x[0])), num(x[1])]);
        }
    }
    for (k, t) in spikes.iter().enumerate() {
        spike_table.push(vec![(k + 1).to_string(), num(*t)]);
    }
    let last = traj.last_state();
    println!(
        "I = {} uA/cm2, q = {}, {} steps; {} spikes; final V = {:.4} mV, n = {:.6}",
        p.i_app,
        p.q,
        traj.len() - 1,
        spikes.len(),
        d.voltage_to_dim(last[0]),
        last[1]
    );
    ctx.emit("simulate", &table, || {
        let stride = (ms.len() / 4000).max(1);
        let pts = ms.iter().zip(&mv).step_by(stride).map(|(&t, &v)| (t, v)).collect();
        svg_plot(
            &[Series { label: format!("q={}", p.q), points: pts }],
            "t (ms)",
            "V (mV)",
            &format!("Membrane potential, I={}", p.i_app),
        )
    })?;
    if ctx.csv {
        spike_table.write(&ctx.out.join("spikes.csv"))?;
    }
    if traj.diverged {
        return Err(CliError::Diverged(format!(
            "state left the bound after t = {:.4} ms (partial trajectory written)",
            ms.last().copied().unwrap_or(0.0)
        )));
    }
    Ok(())
}

fn cmd_hopf_scan(
    ctx: &Ctx,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    v: Option<f64>,
    q_range: &str,
    steps: usize,
) -> Result<(), CliError> {
    let (q_lo, q_hi) = parse_range(q_range)?;
    if !(q_lo > 0.0 && q_hi <= 1.0) {
        return Err(CliError::Parse("--q-range must lie in (0, 1]".into()));
    }
    if steps < 2 {
        return Err(CliError::Parse("--steps must be at least 2".into()));
    }
    let (a, b, c) = match (v, b, c) {
        (Some(v_mv), _, _) => {
            let d = ctx.dimless()?;
            let t = coeffs_at(d.voltage_to_dimless(v_mv), &d)?;
            (Some(t.a()), t.b(), t.c())
        }
        (None, Some(b), Some(c)) => (a, b, c),
        _ => return Err(CliError::Parse("hopf-scan needs --V or both --b and --c".into())),
    };
    let mut table = Table::new(&["q", "a_star", "omega", "transversality", "a", "verdict"]);
    let mut curve = Vec::new();
    for i in 0..steps {
        let q = q_lo + (q_hi - q_lo) * i as f64 / (steps - 1) as f64;
        let hopf = a_star(b, c, q)?;
        let trans = transversality(b, c, q)?;
        let verdict = match a {
            Some(a) => classify(&CharTriple::new(a, b, c, q)?, DEFAULT_TOL)?.kind.to_string(),
            None => String::new(),
        };
        curve.push((q, hopf.a_star));
        table.push(vec![num(q), num(hopf.a_star), num(hopf.omega), num(trans), opt_num(a), verdict]);
    }
    println!("b = {}, c = {}: a* from {} to {}", num(b), num(c), num(curve[0].1), num(curve[steps - 1].1));
    ctx.emit("hopf_scan", &table, || {
        let mut series = vec![Series { label: "a*".into(), points: curve.clone() }];
        if let Some(a) = a {
            series.push(Series { label: "a".into(), points: vec![(q_lo, a), (q_hi, a)] });
        }
        svg_plot(&series, "q", "a", "Hopf locus")
    })
}

struct Check {
    name: &'static str,
    value: f64,
    expected: f64,
    tol: f64,
}

impl Check {
    fn pass(&self) -> bool {
        (self.value - self.expected).abs() <= self.tol
    }
}

fn cmd_verify(ctx: &Ctx, samples: usize, seed: u64) -> Result<(), CliError> {
    let d = ctx.dimless()?;
    let g = special_points(&d, ROOT_TOL)?;
    let hopf = a_star(1.0, 1.0, 0.5)?;
    let mut checks = vec![
        Check { name: "V_alpha", value: d.voltage_to_dim(g.v_alpha), expected: -29.568, tol: 0.005 },
        Check { name: "V_beta", value: d.voltage_to_dim(g.v_beta), expected: -3.5774, tol: 0.005 },
        Check { name: "I_max", value: d.current_to_dim(g.i_max), expected: 39.6935, tol: 0.005 },
        Check { name: "I_min", value: d.current_to_dim(g.i_min), expected: -14.4204, tol: 0.005 },
        Check { name: "V_prime", value: d.voltage_to_dim(g.v_prime), expected: -31.403, tol: 0.005 },
        Check { name: "V_triple_prime", value: d.voltage_to_dim(g.v_triple_prime), expected: 5.28457, tol: 0.005 },
        Check { name: "V_double_prime", value: d.voltage_to_dim(g.v_double_prime), expected: 9.82288, tol: 0.005 },
        Check { name: "a_star(1,1,0.5)", value: hopf.a_star, expected: -1.5, tol: 1e-12 },
        Check { name: "omega(1,1,0.5)", value: hopf.omega, expected: 2.0, tol: 1e-12 },
    ];

    let orders = [(1u32, 3u32), (1, 2), (2, 3), (3, 4)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut agree, mut total) = (0usize, 0usize);
    while total < samples {
        let (p, m) = orders[total % orders.len()];
        let q = p as f64 / m as f64;
        let a: f64 = rng.gen_range(-4.0..2.0);
        let b: f64 = rng.gen_range(0.05..4.0);
        let c: f64 = rng.gen_range(-2.0..6.0);
        if c.abs() <= 1e-4 || (c > 0.0 && (a - a_star(b, c, q)?.a_star).abs() <= 1e-4) {
            continue;
        }
        let t = CharTriple::new(a, b, c, q)?;
        let stable = classify(&t, DEFAULT_TOL)?.is_stable();
        let roots = oracle_roots_rational(&t, p, m, 1e-8)?;
        total += 1;
        if stable == (roots.max_real_part < 0.0) {
            agree += 1;
        }
    }
    checks.push(Check {
        name: "oracle_agreement",
        value: agree as f64 / total.max(1) as f64,
        expected: 1.0,
        tol: 0.0,
    });

    let mut table = Table::new(&["check", "value", "expected", "tolerance", "pass"]);
    let mut failures = Vec::new();
    for ch in &checks {
        let ok = ch.pass();
        println!(
            "{} {:<18} {:>16.9} (expected {}, tol {})",
            if ok { "PASS" } else { "FAIL" },
            ch.name,
            ch.value,
            ch.expected,
            ch.tol
        );
        if !ok {
            failures.push(ch.name);
        }
        table.push(vec![ch.name.to_string(), num(ch.value), num(ch.expected), num(ch.tol), ok.to_string()]);
    }
    if ctx.csv {
        table.write(&ctx.out.join("verify.csv"))?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Fixture(failures.join(", ")))
    }
}
