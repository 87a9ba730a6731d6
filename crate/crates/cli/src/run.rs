//! Executes a [`Plan`] into a result [`Table`].

use num_complex::Complex64;
use stieltjes_core::{
    sinr_from_state, sinr_sweep, solve_product_chain, solve_product_grid, solve_sum_grid, solve_theorem1_warm, to_db,
    CdmaFixedPointState, CdmaScenario, Error, HalfPlanePoint,
};
use stieltjes_lab::{mc_cdma_sinr, mc_cdma_transform, mc_product_transform, mc_sum_transform, LabError, McSamples};

use crate::config::{Mode, Plan, Problem};
use crate::output::{Cell, Table};

/// Per-row status: `ok` or a short error kind.
pub fn status_of(e: &Error) -> &'static str {
    match e.root() {
        Error::NonConvergence { .. } => "non_convergence",
        Error::SpectralEdge { .. } => "spectral_edge",
        Error::AmbiguousFixedPoint { .. } => "ambiguous_fixed_point",
        Error::EvaluationPole => "evaluation_pole",
        _ => "error",
    }
}

/// Transform value and diagnostics of one solved grid point.
struct Solved {
    g: Complex64,
    residual: f64,
    iterations: usize,
}

fn report(z: &HalfPlanePoint, e: &Error) {
    log::warn!("z = {} + {}i: {e}", z.re(), z.im());
}

fn solve_transforms(plan: &Plan) -> Vec<Result<Solved, Error>> {
    let z = &plan.z_grid;
    let cfg = &plan.solver;
    match &plan.problem {
        Problem::Sum(ms) => solve_sum_grid(ms, z, cfg)
            .into_iter()
            .map(|r| r.map(|s| Solved { g: s.g, residual: s.residual, iterations: s.iterations }))
            .collect(),
        Problem::Product(ms) if ms.len() == 2 => solve_product_grid(&ms[0], &ms[1], z, cfg)
            .into_iter()
            .map(|r| r.map(|s| Solved { g: s.g, residual: s.residual, iterations: s.iterations }))
            .collect(),
        Problem::Product(ms) => match solve_product_chain(ms, z, &plan.chain, cfg) {
            Ok((_, states)) => states
                .into_iter()
                .map(|s| Ok(Solved { g: s.g, residual: s.residual, iterations: s.iterations }))
                .collect(),
            Err(e) => z.iter().map(|_| Err(e.clone())).collect(),
        },
        Problem::Cdma(sc) => cdma_states(sc, plan)
            .into_iter()
            .map(|r| r.map(|s| Solved { g: s.g, residual: s.residual, iterations: s.iterations }))
            .collect(),
    }
}

fn cdma_states(sc: &CdmaScenario, plan: &Plan) -> Vec<Result<CdmaFixedPointState, Error>> {
    let mut last: Option<CdmaFixedPointState> = None;
    plan.z_grid
        .iter()
        .map(|&z| {
            let out = solve_theorem1_warm(sc, z, &plan.solver, last.as_ref());
            if let Ok(s) = &out {
                last = Some(s.clone());
            }
            out
        })
        .collect()
}

fn nan_row(prefix: Vec<Cell>, nans: usize, tail: Vec<Cell>) -> Vec<Cell> {
    prefix.into_iter().chain((0..nans).map(|_| Cell::Num(f64::NAN))).chain(tail).collect()
}

fn transform_table(plan: &Plan) -> Table {
    let mut t = Table::new(&["z_re", "z_im", "G_re", "G_im", "residual", "iterations", "status"]);
    for (z, r) in plan.z_grid.iter().zip(solve_transforms(plan)) {
        let head = vec![z.re().into(), z.im().into()];
        match r {
            Ok(s) => t.push(nan_row(
                head,
                0,
                vec![s.g.re.into(), s.g.im.into(), s.residual.into(), s.iterations.into(), "ok".into()],
            )),
            Err(e) => {
                report(z, &e);
                t.push(nan_row(head, 3, vec![0usize.into(), status_of(&e).into()]));
            }
        }
    }
    t
}

fn cdma_stieltjes_table(sc: &CdmaScenario, plan: &Plan) -> Table {
    let mut t = Table::new(&[
        "z_re",
        "z_im",
        "transmitter",
        "G_re",
        "G_im",
        "rho_re",
        "rho_im",
        "tau_re",
        "tau_im",
        "residual",
        "iterations",
        "status",
    ]);
    for (z, r) in plan.z_grid.iter().zip(cdma_states(sc, plan)) {
        for j in 0..sc.len() {
            let head = vec![z.re().into(), z.im().into(), j.into()];
            match &r {
                Ok(s) => t.push(nan_row(
                    head,
                    0,
                    vec![
                        s.g.re.into(),
                        s.g.im.into(),
                        s.rho[j].re.into(),
                        s.rho[j].im.into(),
                        s.tau[j].re.into(),
                        s.tau[j].im.into(),
                        s.residual.into(),
                        s.iterations.into(),
                        "ok".into(),
                    ],
                )),
                Err(e) => {
                    if j == 0 {
                        report(z, e);
                    }
                    t.push(nan_row(head, 7, vec![0usize.into(), status_of(e).into()]));
                }
            }
        }
    }
    t
}

/// SNR values of the sweep; without a grid, the single point implied by the
/// scenario's own noise variance.
fn snr_points(sc: &CdmaScenario, plan: &Plan) -> Vec<f64> {
    if plan.snr_grid.is_empty() {
        let signal = sc.transmitters()[0].power.mean() * sc.channel().marginal_mean(0);
        vec![to_db(signal / sc.noise_variance())]
    } else {
        plan.snr_grid.clone()
    }
}

/// Linear SINR per transmitter, residual and iterations.
type SolvedSinr = (Vec<f64>, f64, usize);

/// Linear SINR per transmitter at each SNR point, or the point's error.
fn solver_sinr(sc: &CdmaScenario, plan: &Plan, snr: &[f64]) -> Vec<(f64, Result<SolvedSinr, Error>)> {
    sinr_sweep(sc, snr, plan.epsilon, &plan.solver)
        .into_iter()
        .zip(snr)
        .map(|(r, &snr_db)| {
            let noise = sc.noise_for_snr_db(snr_db);
            let out = r.and_then(|p| {
                let sinr = match plan.power_level {
                    None => p.sinr.clone(),
                    Some(level) => (0..sc.len())
                        .map(|j| sinr_from_state(&p.state, j, level, plan.epsilon))
                        .collect::<Result<Vec<_>, _>>()?,
                };
                Ok((sinr, p.state.residual, p.state.iterations))
            });
            (noise, out)
        })
        .collect()
}

fn cdma_sinr_table(sc: &CdmaScenario, plan: &Plan) -> Table {
    let mut t = Table::new(&[
        "snr_db",
        "noise_variance",
        "transmitter",
        "power_level",
        "sinr",
        "sinr_db",
        "residual",
        "iterations",
        "status",
    ]);
    let snr = snr_points(sc, plan);
    let pbar = sc.pbar();
    for (&snr_db, (noise, r)) in snr.iter().zip(solver_sinr(sc, plan, &snr)) {
        if let Err(e) = &r {
            log::warn!("snr {snr_db} dB: {e}");
        }
        for j in 0..sc.len() {
            let level = plan.power_level.unwrap_or(pbar[j]);
            let head = vec![snr_db.into(), noise.into(), j.into(), level.into()];
            match &r {
                Ok((sinr, residual, iterations)) => t.push(nan_row(
                    head,
                    0,
                    vec![sinr[j].into(), to_db(sinr[j]).into(), (*residual).into(), (*iterations).into(), "ok".into()],
                )),
                Err(e) => t.push(nan_row(head, 3, vec![0usize.into(), status_of(e).into()])),
            }
        }
    }
    t
}

fn mc_transforms(plan: &Plan) -> Result<McSamples, LabError> {
    let mc = plan.mc;
    let z = &plan.z_grid;
    match &plan.problem {
        Problem::Sum(ms) => mc_sum_transform(ms, mc.n, z, mc.trials, mc.seed),
        Problem::Product(ms) => mc_product_transform(&ms[0], &ms[1], mc.n, z, mc.trials, mc.seed),
        Problem::Cdma(sc) => mc_cdma_transform(sc, mc.n, z, mc.trials, mc.seed),
    }
}

/// Trial-averaged linear SINR, `[point][transmitter]`.
fn mc_sinr(sc: &CdmaScenario, plan: &Plan, snr: &[f64]) -> Result<Vec<Vec<f64>>, LabError> {
    let noise: Vec<f64> = snr.iter().map(|&s| sc.noise_for_snr_db(s)).collect();
    Ok(mc_cdma_sinr(sc, plan.mc.n, &noise, plan.mc.trials, plan.mc.seed)?.mean_sinr())
}

fn monte_carlo_table(plan: &Plan) -> Result<Table, LabError> {
    let (n, trials) = (plan.mc.n, plan.mc.trials);
    if let (Problem::Cdma(sc), true) = (&plan.problem, plan.z_grid.is_empty()) {
        let mut t = Table::new(&["snr_db", "noise_variance", "transmitter", "sinr_mc", "sinr_db_mc", "n", "trials"]);
        let sinr = mc_sinr(sc, plan, &plan.snr_grid)?;
        for (&snr_db, row) in plan.snr_grid.iter().zip(&sinr) {
            for (j, &s) in row.iter().enumerate() {
                let noise = sc.noise_for_snr_db(snr_db);
                t.push(vec![snr_db.into(), noise.into(), j.into(), s.into(), to_db(s).into(), n.into(), trials.into()]);
            }
        }
        return Ok(t);
    }
    let mut t = Table::new(&["z_re", "z_im", "G_mc_re", "G_mc_im", "n", "trials"]);
    let mean = mc_transforms(plan)?.mean();
    for (z, g) in plan.z_grid.iter().zip(mean) {
        t.push(vec![z.re().into(), z.im().into(), g.re.into(), g.im.into(), n.into(), trials.into()]);
    }
    Ok(t)
}

fn compare_table(plan: &Plan) -> Result<Table, LabError> {
    let (n, trials) = (plan.mc.n, plan.mc.trials);
    if let (Problem::Cdma(sc), true) = (&plan.problem, plan.z_grid.is_empty()) {
        let mut t = Table::new(&[
            "snr_db",
            "noise_variance",
            "transmitter",
            "sinr_db_solver",
            "sinr_db_mc",
            "gap_db",
            "n",
            "trials",
            "status",
        ]);
        let solved = solver_sinr(sc, &Plan { power_level: None, ..plan.clone() }, &plan.snr_grid);
        let mc = mc_sinr(sc, plan, &plan.snr_grid)?;
        for ((&snr_db, (noise, r)), mc_row) in plan.snr_grid.iter().zip(solved).zip(&mc) {
            for (j, &m) in mc_row.iter().enumerate() {
                let head: Vec<Cell> = vec![snr_db.into(), noise.into(), j.into()];
                let (solver_db, status) = match &r {
                    Ok((sinr, _, _)) => (to_db(sinr[j]), "ok"),
                    Err(e) => (f64::NAN, status_of(e)),
                };
                let mc_db = to_db(m);
                t.push(nan_row(
                    head,
                    0,
                    vec![
                        solver_db.into(),
                        mc_db.into(),
                        (solver_db - mc_db).abs().into(),
                        n.into(),
                        trials.into(),
                        status.into(),
                    ],
                ));
            }
        }
        return Ok(t);
    }
    let mut t = Table::new(&[
        "z_re",
        "z_im",
        "G_solver_re",
        "G_solver_im",
        "G_mc_re",
        "G_mc_im",
        "abs_gap",
        "n",
        "trials",
        "status",
    ]);
    let solved = solve_transforms(plan);
    let samples = mc_transforms(plan)?;
    let mean = samples.mean();
    let target: Vec<Complex64> =
        solved.iter().map(|r| r.as_ref().map_or(Complex64::new(f64::NAN, f64::NAN), |s| s.g)).collect();
    for ((z, r), g_mc) in plan.z_grid.iter().zip(&solved).zip(mean) {
        let status = match r {
            Ok(_) => "ok",
            Err(e) => {
                report(z, e);
                status_of(e)
            }
        };
        let g = target[t.rows.len()];
        t.push(vec![
            z.re().into(),
            z.im().into(),
            g.re.into(),
            g.im.into(),
            g_mc.re.into(),
            g_mc.im.into(),
            (g_mc - g).norm().into(),
            n.into(),
            trials.into(),
            status.into(),
        ]);
    }
    Ok(t)
}

/// Runs the plan. Solver failures become per-row statuses; only Monte Carlo
/// setup errors abort.
pub fn execute(plan: &Plan) -> Result<Table, LabError> {
    Ok(match (&plan.mode, &plan.problem) {
        (Mode::FreeSum | Mode::FreeProduct, _) => transform_table(plan),
        (Mode::CdmaStieltjes, Problem::Cdma(sc)) => cdma_stieltjes_table(sc, plan),
        (Mode::CdmaSinr, Problem::Cdma(sc)) => cdma_sinr_table(sc, plan),
        (Mode::MonteCarlo, _) => monte_carlo_table(plan)?,
        (Mode::Compare, _) => compare_table(plan)?,
        _ => unreachable!("validated plans pair CDMA modes with CDMA scenarios"),
    })
}
