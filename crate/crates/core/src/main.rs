use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use strategic_pricing::continuous::{solve_continuous_pbe, ContinuousParams};
use strategic_pricing::io::{run_comments, Cell, Format, Settings, Table};
use strategic_pricing::network::{self, SocialGraph};
use strategic_pricing::oracle::{self, GridSpec, LinearUtility};
use strategic_pricing::pbe::{boundary_distances, solve_pbe_nonuniform, EquilibriumOutcome};
use strategic_pricing::policy::{Plan, PlanMix};
use strategic_pricing::welfare::welfare_report;
use strategic_pricing::MarketParams;

#[derive(Parser)]
#[command(name = "strategic-pricing", version, about = "Equilibrium pricing under manipulated social-interaction data")]
struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel work.
    #[arg(long, global = true, env = "STRATEGIC_PRICING_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form equilibrium.
    Solve(Settings),
    /// Region label and distances to each boundary.
    Region(Settings),
    /// Revenue and payoff comparison across mechanisms.
    Welfare(Settings),
    /// Brute-force, Monte-Carlo and structural checks against the closed form.
    Verify(Settings),
    /// No-learning, undisclosed and strategic pricing on a social graph.
    Simulate(Settings),
    /// Equilibrium with continuous valuations.
    Continuous(Settings),
    /// Revenue of the three mechanisms over a v_H sweep at fixed v_L/v_H.
    Fig7(Settings),
}

fn market(s: &Settings) -> Result<MarketParams> {
    let v_h = Settings::require(&s.v_h, "v_h")?;
    let v_l = match (s.v_l, s.ratio) {
        (Some(v), _) => v,
        (None, Some(r)) => r * v_h,
        (None, None) => bail!("missing required setting `v_l` (or `ratio`)"),
    };
    let l = Settings::require(&s.l, "l")?;
    Ok(MarketParams::with_all(v_h, v_l, l, s.c.unwrap_or(1.0), s.r.unwrap_or(0.5), s.alpha.unwrap_or(0.5))?)
}

fn graph(s: &Settings) -> Result<SocialGraph> {
    match &s.graph {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            Ok(network::load_edge_list(BufReader::new(f))?)
        }
        None => Ok(network::bundled_fixture()),
    }
}

/// Standardized error; a zero-variance sample scores 0 on an exact match.
fn z_score(diff: f64, std_err: f64) -> f64 {
    if std_err > 0.0 {
        diff / std_err
    } else if diff.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn mix_text(m: &PlanMix) -> String {
    m.support().map(|(p, w): (Plan, f64)| format!("{p:?}:{}", strategic_pricing::io::sig9(w))).collect::<Vec<_>>().join(";")
}

fn outcome_table(o: &EquilibriumOutcome) -> Result<Table> {
    let mut t = Table::new(&[
        "region",
        "rho_star",
        "beta_star",
        "belief_s",
        "posterior_hh_given_1",
        "posterior_hh_given_0",
        "alpha",
        "policy_signal_1",
        "policy_signal_0",
    ]);
    t.push(vec![
        o.region.label().into(),
        o.rho_star.into(),
        o.beta_star.map(Cell::Num).unwrap_or_else(|| "".into()),
        o.belief_s.into(),
        o.posterior_hh_given_1.into(),
        o.posterior_hh_given_0.into(),
        o.alpha.into(),
        mix_text(&o.policy.on_signal_1).into(),
        mix_text(&o.policy.on_signal_0).into(),
    ])?;
    Ok(t)
}

struct Emitter {
    format: Format,
    output: Option<PathBuf>,
    comments: Vec<String>,
}

impl Emitter {
    fn emit<T: Serialize>(&self, table: &Table, json: &T) -> Result<()> {
        let mut sink: Box<dyn Write> = match &self.output {
            Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
            None => Box::new(std::io::stdout().lock()),
        };
        match self.format {
            Format::Csv => table.write_csv(&mut sink, &self.comments)?,
            Format::Json => strategic_pricing::io::write_json(&mut sink, json)?,
        }
        sink.flush()?;
        Ok(())
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    let (name, flags) = match &cli.command {
        Command::Solve(s) => ("solve", s),
        Command::Region(s) => ("region", s),
        Command::Welfare(s) => ("welfare", s),
        Command::Verify(s) => ("verify", s),
        Command::Simulate(s) => ("simulate", s),
        Command::Continuous(s) => ("continuous", s),
        Command::Fig7(s) => ("fig7", s),
    };
    let base = match &cli.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    let s = base.overlay(flags);
    let out = Emitter { format: s.format.unwrap_or_default(), output: s.output.clone(), comments: run_comments(name, s.seed) };

    match name {
        "solve" => {
            let o = solve_pbe_nonuniform(&market(&s)?)?;
            out.emit(&outcome_table(&o)?, &o)
        }
        "region" => {
            let p = market(&s)?;
            let o = solve_pbe_nonuniform(&p)?;
            let d = boundary_distances(&p);
            let mut t = Table::new(&["region", "region_i", "skewed", "region_ii", "cp", "bp", "split"]);
            t.push(vec![o.region.label().into(), d.region_i.into(), d.skewed.into(), d.region_ii.into(), d.cp.into(), d.bp.into(), d.split.into()])?;
            #[derive(Serialize)]
            struct R {
                region: String,
                distances: strategic_pricing::pbe::BoundaryDistances,
            }
            out.emit(&t, &R { region: o.region.label().into(), distances: d })
        }
        "welfare" => {
            let w = welfare_report(&market(&s)?)?;
            let mut t = Table::new(&[
                "region",
                "revenue_no_learning",
                "revenue_undisclosed",
                "revenue_strategic",
                "payoff_undisclosed",
                "payoff_strategic",
                "gain_strategic_vs_no",
                "loss_awareness",
                "known_low_gain",
                "buyer_worse_off",
            ]);
            t.push(vec![
                w.region.label().into(),
                w.revenue_no_learning.into(),
                w.revenue_undisclosed.into(),
                w.revenue_strategic.into(),
                w.payoff_undisclosed.into(),
                w.payoff_strategic.into(),
                w.gain_strategic_vs_no.into(),
                w.loss_awareness.into(),
                w.known_low_gain.into(),
                w.buyer_worse_off.to_string().into(),
            ])?;
            out.emit(&t, &w)
        }
        "verify" => {
            let p = market(&s)?;
            let seed = Settings::require(&s.seed, "seed")?;
            let samples = s.samples.unwrap_or(1_000_000);
            let o = solve_pbe_nonuniform(&p)?;
            let grid = GridSpec::default_for(&p);
            let found = oracle::brute_force_pbe(&p, &grid)?;
            let beta_of = |e: &oracle::EpsEquilibrium| match o.region {
                strategic_pricing::Region::IV => e.policy.on_signal_1.weight(Plan::UniformLow),
                strategic_pricing::Region::V => e.policy.on_signal_0.weight(Plan::UniformHigh),
                _ => 0.0,
            };
            let beta = o.beta_star.unwrap_or(0.0);
            let nearest = found
                .iter()
                .map(|e| (e.rho - o.rho_star).abs().max((beta_of(e) - beta).abs()))
                .fold(f64::INFINITY, f64::min);
            let max_eps = found.iter().map(|e| e.epsilon).fold(0.0, f64::max);
            let mc = oracle::monte_carlo_play(&o, &p, samples, seed)?;
            let (rev, pay) = strategic_pricing::pbe::expected_play(&o, &p);
            let binary = oracle::verify_binary_pricing(&p, &grid.price_grid)?;
            let freq: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
            let polar = oracle::verify_frequency_polarization(&p, &freq, &LinearUtility { l: p.l(), c: p.c(), r: p.r() })?;
            let mut t = Table::new(&["check", "passed", "value"]);
            t.push(vec!["brute_force_nearest".into(), (nearest <= grid.rho_step.max(grid.mix_step) + 1e-12).to_string().into(), nearest.into()])?;
            t.push(vec!["brute_force_max_epsilon".into(), (max_eps <= grid.epsilon(&p)).to_string().into(), max_eps.into()])?;
            t.push(vec!["mc_revenue_z".into(), mc.revenue.covers(rev, 3.0).to_string().into(), z_score(mc.revenue.mean - rev, mc.revenue.std_err).into()])?;
            t.push(vec!["mc_payoff_z".into(), mc.buyer_payoff.covers(pay, 3.0).to_string().into(), z_score(mc.buyer_payoff.mean - pay, mc.buyer_payoff.std_err).into()])?;
            t.push(vec!["binary_pricing".into(), binary.to_string().into(), "".into()])?;
            t.push(vec!["frequency_polarization".into(), polar.to_string().into(), "".into()])?;
            #[derive(Serialize)]
            struct V {
                nearest: f64,
                max_epsilon: f64,
                equilibria_found: usize,
                monte_carlo: strategic_pricing::sim::SimulationReport,
                closed_form_revenue: f64,
                closed_form_payoff: f64,
                binary_pricing: bool,
                frequency_polarization: bool,
            }
            out.emit(
                &t,
                &V {
                    nearest,
                    max_epsilon: max_eps,
                    equilibria_found: found.len(),
                    monte_carlo: mc,
                    closed_form_revenue: rev,
                    closed_form_payoff: pay,
                    binary_pricing: binary,
                    frequency_polarization: polar,
                },
            )
        }
        "simulate" => {
            let p = market(&s)?;
            let seed = Settings::require(&s.seed, "seed")?;
            let shuffles = s.shuffles.unwrap_or(10_000);
            let g = network::sample_preferences(&graph(&s)?, p.alpha(), seed)?;
            let c = network::compare_mechanisms(&g, &p, shuffles, seed)?;
            let mut t = Table::new(&["mechanism", "mean", "stderr"]);
            for (name, e) in [("nlp", c.nlp), ("ulp", c.ulp), ("slp", c.slp)] {
                t.push(vec![name.into(), e.mean.into(), e.std_err.into()])?;
            }
            out.emit(&t, &c)
        }
        "continuous" => {
            let cp = ContinuousParams::new(Settings::require(&s.v_bar, "v_bar")?, Settings::require(&s.l, "l")?)?;
            let o = solve_continuous_pbe(&cp)?;
            let mut t = Table::new(&["case_id", "rho_star", "p1_on_signal1", "p1_on_signal0", "p2_s1_bought", "p2_s1_passed", "p2_s0_bought", "p2_s0_passed"]);
            t.push(vec![
                f64::from(o.case_id).into(),
                o.rho_star.into(),
                o.p1_on_signal1.into(),
                o.p1_on_signal0.into(),
                o.p2(1, true).into(),
                o.p2(1, false).into(),
                o.p2(0, true).into(),
                o.p2(0, false).into(),
            ])?;
            out.emit(&t, &o)
        }
        "fig7" => {
            let seed = Settings::require(&s.seed, "seed")?;
            let ratio = Settings::require(&s.ratio, "ratio")?;
            let l = Settings::require(&s.l, "l")?;
            let g = network::sample_preferences(&graph(&s)?, s.alpha.unwrap_or(0.5), seed)?;
            let sweep = network::revenue_sweep(
                &g,
                ratio,
                l,
                s.vh_max.unwrap_or(4.0),
                s.steps.unwrap_or(20),
                s.shuffles.unwrap_or(10_000),
                seed,
            )?;
            let mut t = Table::new(&["v_H", "nlp_mean", "ulp_mean", "slp_mean", "slp_stderr"]);
            for pt in &sweep {
                t.push(vec![pt.v_h.into(), pt.revenue.nlp.mean.into(), pt.revenue.ulp.mean.into(), pt.revenue.slp.mean.into(), pt.revenue.slp.std_err.into()])?;
            }
            out.emit(&t, &sweep)
        }
        _ => unreachable!("every subcommand is matched above"),
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
