use nhces::aggregation::AggregateEconomy;
use nhces::distributions::{amoroso_pdf, amoroso_quantile};
use nhces::euler::PathMode;
use nhces::grid::sample_goods_grid;
use nhces::logit::LogitEconomy;
use nhces::{oracle, verify};

use crate::config::{EulerMode, RunConfig};
use crate::output::{fmt, write_csv};
use crate::{CmdError, FigKind};

fn numeric(e: nhces::Error) -> CmdError {
    CmdError::Numeric(e.to_string())
}

/// Parameter-shaped failures are config errors; everything else is a
/// numerical failure at runtime.
fn classify(e: nhces::Error) -> CmdError {
    match e {
        nhces::Error::InvalidParameter(_) | nhces::Error::SimulationRequiresSubstitutes => {
            CmdError::Config(e.to_string())
        }
        _ => CmdError::Numeric(e.to_string()),
    }
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<(), CmdError> {
    let params = cfg.preference_params()?;
    let rho = params.rho();
    let grid = cfg.build_grid(&params)?;
    let econ = cfg.closed_form()?;

    let mut rows = Vec::new();
    for &e in &cfg.expenditures {
        let point = oracle::demand(&grid, rho, e).map_err(numeric)?;
        for (g, share) in grid.goods().iter().zip(&point.shares) {
            rows.push(vec![
                fmt(e),
                fmt(g.epsilon),
                fmt(g.price),
                fmt(g.omega),
                fmt(*share),
                fmt(econ.expenditure_elasticity(g.epsilon, e)),
            ]);
        }
    }
    let path = write_csv(
        &cfg.output_dir,
        "demand.csv",
        "expenditure,epsilon,price,omega,share,elasticity",
        &rows,
    )?;
    println!("wrote {} ({} rows)", path.display(), rows.len());

    // 25 log-spaced levels spanning half the smallest to twice the largest
    // requested expenditure, with the brute-force solve alongside.
    let e_min = cfg.expenditures.iter().copied().fold(f64::INFINITY, f64::min);
    let e_max = cfg.expenditures.iter().copied().fold(0.0f64, f64::max);
    let (lo, hi) = ((0.5 * e_min).ln(), (2.0 * e_max).ln());
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for j in 0..25 {
        let e = (lo + (hi - lo) * j as f64 / 24.0).exp();
        let closed = econ.log_utility_of_expenditure(e).map_err(numeric)?;
        let brute = oracle::utility_of_expenditure(&grid, rho, e).map_err(numeric)?.ln();
        let dev = (closed - brute).abs();
        worst = worst.max(dev);
        rows.push(vec![fmt(e), fmt(closed), fmt(brute), fmt(dev)]);
    }
    let path = write_csv(
        &cfg.output_dir,
        "mapping.csv",
        "expenditure,log_utility_closed_form,log_utility_oracle,deviation",
        &rows,
    )?;
    println!("wrote {} (max deviation {worst:.2e})", path.display());
    Ok(())
}

pub fn cmd_aggregate(cfg: &RunConfig) -> Result<(), CmdError> {
    let params = cfg.preference_params()?;
    let grid = cfg.build_grid(&params)?;
    let section = cfg.amoroso_section()?;
    let agg = AggregateEconomy::new(cfg.closed_form()?, section.k, section.m)
        .map_err(classify)?;

    // Up to 20 goods sampled evenly across the menu.
    let stride = (grid.len() / 20).max(1);
    let mut rows = Vec::new();
    for (i, g) in grid.goods().iter().enumerate().step_by(stride) {
        let exact = agg.aggregate_share(g.epsilon, g.omega, g.price);
        let mean_form = agg
            .aggregate_share_mean_form(g.epsilon, g.omega, g.price)
            .map_err(numeric)?;
        let approx = agg
            .aggregate_share_approx(g.epsilon, g.omega, g.price)
            .map_err(numeric)?;
        let mc = agg
            .mc_aggregate_share(
                g.epsilon,
                g.omega,
                g.price,
                section.draws,
                cfg.seed.wrapping_add(1000).wrapping_add(i as u64),
            )
            .map_err(numeric)?;
        rows.push(vec![
            fmt(g.epsilon),
            fmt(g.price),
            fmt(g.omega),
            fmt(exact),
            fmt(mean_form),
            fmt(approx.value),
            fmt(mc.mean),
            fmt(mc.std_error),
        ]);
    }
    let path = write_csv(
        &cfg.output_dir,
        "aggregate.csv",
        "epsilon,price,omega,exact,mean_form,approximation,mc_mean,mc_std_error",
        &rows,
    )?;
    let mean = agg.mean_expenditure().map_err(numeric)?;
    println!(
        "wrote {} ({} goods, mean expenditure {:.6})",
        path.display(),
        rows.len(),
        mean
    );
    Ok(())
}

pub fn cmd_euler(cfg: &RunConfig) -> Result<(), CmdError> {
    let econ = cfg.closed_form()?;
    let (euler_cfg, section) = cfg.euler_config(econ)?;
    let mode = match section.mode {
        EulerMode::Normalized => PathMode::Normalized,
        EulerMode::Unnormalized => PathMode::Unnormalized,
    };
    let solved = euler_cfg.solve_path(section.e0, mode).map_err(numeric)?;
    let rows: Vec<Vec<String>> = solved
        .expenditures
        .iter()
        .enumerate()
        .map(|(t, &e)| {
            let residual = if t == 0 { 0.0 } else { solved.residuals[t - 1] };
            vec![t.to_string(), fmt(e), fmt(solved.log_utilities[t]), fmt(residual)]
        })
        .collect();
    let path = write_csv(
        &cfg.output_dir,
        "path.csv",
        "t,expenditure,log_utility,residual",
        &rows,
    )?;
    println!("wrote {} ({} periods)", path.display(), rows.len() - 1);

    let dist = cfg.expenditure_distribution()?;
    let panel = euler_cfg
        .evolve_panel_simulated(
            &dist,
            euler_cfg.rates()[0],
            section.panel_households,
            cfg.seed.wrapping_add(2),
        )
        .map_err(classify)?;
    let rows: Vec<Vec<String>> = panel
        .quantiles
        .iter()
        .map(|&(p, predicted, simulated)| vec![fmt(p), fmt(predicted), fmt(simulated)])
        .collect();
    let path = write_csv(
        &cfg.output_dir,
        "panel.csv",
        "probability,predicted_quantile,simulated_quantile",
        &rows,
    )?;
    let ks_ok = panel.ks_distance < panel.ks_critical_1pct;
    println!(
        "wrote {} (growth factor {:.6}, KS {:.4} vs 1% critical {:.4}: {})",
        path.display(),
        panel.growth_factor,
        panel.ks_distance,
        panel.ks_critical_1pct,
        if ks_ok { "PASS" } else { "FAIL" }
    );
    Ok(())
}

pub fn cmd_logit(cfg: &RunConfig) -> Result<(), CmdError> {
    let params = cfg.preference_params()?;
    let section = cfg.logit_section()?;
    let goods = sample_goods_grid(&params, section.goods, cfg.seed).map_err(classify)?;
    let rho = section.rho.unwrap_or(params.rho());
    let econ = LogitEconomy::new(goods, rho, section.expenditure).map_err(classify)?;
    let report = econ.share_equivalence_report().map_err(numeric)?;
    let counts = econ
        .simulate_choices(section.households, cfg.seed.wrapping_add(3))
        .map_err(classify)?;

    let n = section.households as f64;
    let rows: Vec<Vec<String>> = report
        .choice_probabilities
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let freq = counts[i] as f64 / n;
            vec![
                i.to_string(),
                fmt(p),
                fmt(report.formula_shares[i]),
                fmt(report.oracle_shares[i]),
                fmt(freq),
                fmt((p * (1.0 - p) / n).sqrt()),
            ]
        })
        .collect();
    let path = write_csv(
        &cfg.output_dir,
        "logit.csv",
        "good,probability,share_formula,share_oracle,simulated_frequency,std_error",
        &rows,
    )?;
    println!(
        "wrote {} (probability vs formula {:.2e}, vs brute force {:.2e})",
        path.display(),
        report.max_dev_probabilities_vs_formula,
        report.max_dev_formula_vs_oracle
    );
    Ok(())
}

pub fn cmd_fig(cfg: &RunConfig, which: FigKind) -> Result<(), CmdError> {
    match which {
        FigKind::Joint => {
            let params = cfg.preference_params()?;
            let grid = sample_goods_grid(&params, cfg.grid.size, cfg.seed).map_err(classify)?;
            let rows: Vec<Vec<String>> = grid
                .goods()
                .iter()
                .map(|g| vec![fmt(g.epsilon), fmt(g.price.ln())])
                .collect();
            let path = write_csv(&cfg.output_dir, "joint.csv", "epsilon,log_price", &rows)?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
        }
        FigKind::Amoroso => {
            let fig = cfg.fig_section();
            let mut upper: f64 = 0.0;
            for curve in &fig.curves {
                upper = upper.max(amoroso_quantile(curve, 0.995).map_err(numeric)?);
            }
            let mut rows = Vec::new();
            for curve in &fig.curves {
                for j in 1..=fig.points {
                    let x = upper * j as f64 / fig.points as f64;
                    let pdf = amoroso_pdf(curve, x).map_err(numeric)?;
                    rows.push(vec![
                        fmt(curve.k()),
                        fmt(curve.m()),
                        fmt(curve.n()),
                        fmt(x),
                        fmt(pdf),
                    ]);
                }
            }
            let path = write_csv(&cfg.output_dir, "amoroso.csv", "k,m,n,x,pdf", &rows)?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
        }
    }
    Ok(())
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<(), CmdError> {
    // The battery runs a pinned parameter matrix; the config is still
    // validated so malformed documents fail at the config stage.
    cfg.preference_params()?;
    let checks = verify::run_all();
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut all_passed = true;
    for check in &checks {
        println!(
            "{} {:width$}  {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
        all_passed &= check.passed;
    }
    if all_passed {
        println!("{} checks passed", checks.len());
        Ok(())
    } else {
        Err(CmdError::VerifyFailed)
    }
}
