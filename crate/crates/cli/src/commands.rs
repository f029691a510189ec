//! One function per subcommand. Each returns whether every check passed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use lbkit::checks::{self, input_cases, CaseOptions, InstanceReport, SWEEP_CSV_HEADER};
use lbkit::gadgets::{Construction, ConstructionParams, Instance};
use lbkit::reduction::{self, ReduceOptions};
use lbkit::scalar::render_rational;
use lbkit::sim::{self, ApspDiameter, BfsLayers, FloodMax, NodeProgram, PublicParams, SimConfig, SpannerCheck};
use lbkit::{distance, io, spanner, Rational};

use crate::instance::{rational, spanner_params, InstanceArgs, Recipe, Settings};
use crate::{emit, out_path, Algo, CaseArgs, Command, OutArgs, SimArgs};

pub fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Build { inst, out } => build(&inst, &out),
        Command::Verify { inst, cases, out } => verify(&inst, &cases, &out),
        Command::Simulate {
            inst,
            sim,
            source,
            dhat,
            ledger_csv,
            out,
        } => simulate(&inst, &sim, source, dhat, ledger_csv.as_deref(), &out),
        Command::Reduce {
            inst,
            sim,
            c_disj,
            check_equivalence,
            out,
        } => reduce(&inst, &sim, &c_disj, check_equivalence, &out),
        Command::Sweep {
            construction,
            k,
            p,
            shaved,
            alpha,
            beta,
            x,
            weighted,
            cases,
            seed,
            density,
            csv,
            out,
        } => {
            let grid = Grid {
                construction,
                ks: k,
                ps: p,
                shaved,
                spanner: (construction == Construction::Spanner)
                    .then(|| spanner_params(alpha.as_deref(), beta.as_deref(), x, weighted, None))
                    .transpose()?,
            };
            let opts = CaseOptions {
                trials: cases.trials,
                seed,
                density: rational("density", &density)?,
                exhaustive: cases.exhaustive,
            };
            sweep(&grid, opts, csv, &out)
        }
        Command::ExportDot { inst, out } => export_dot(&inst, &out),
    }
}

fn file_stem(s: &Settings) -> String {
    format!("{}-k{}", s.construction, s.k)
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    emit(path, &serde_json::to_string_pretty(value)?)
}

fn build(args: &InstanceArgs, out: &OutArgs) -> Result<bool> {
    let (inst, settings, _) = args.single()?;
    emit(out_path(out, &format!("{}.json", file_stem(&settings))).as_deref(), &io::to_json(&inst))?;
    Ok(true)
}

fn export_dot(args: &InstanceArgs, out: &OutArgs) -> Result<bool> {
    let (inst, settings, _) = args.single()?;
    emit(out_path(out, &format!("{}.dot", file_stem(&settings))).as_deref(), &io::to_dot(&inst))?;
    Ok(true)
}

/// Per-check pass and fail counts.
#[derive(Default, Serialize)]
struct CheckTally {
    pass: usize,
    fail: usize,
}

fn tally(reports: &[InstanceReport]) -> BTreeMap<&'static str, CheckTally> {
    let mut out: BTreeMap<&'static str, CheckTally> = BTreeMap::new();
    for r in reports {
        for c in &r.checks {
            let t = out.entry(c.name).or_default();
            if c.pass {
                t.pass += 1;
            } else {
                t.fail += 1;
            }
        }
    }
    out
}

const MAX_LISTED_FAILURES: usize = 20;

fn exhaustive_guard(len: usize, exhaustive: bool) -> Result<()> {
    if exhaustive && len > 8 {
        bail!("--exhaustive needs an input length of at most 8, this one has {len}");
    }
    Ok(())
}

fn verify(args: &InstanceArgs, cases: &CaseArgs, out: &OutArgs) -> Result<bool> {
    let single = args.graph.is_some() || args.sa.is_some();
    let (settings, source, reports) = if single {
        let (inst, settings, source) = args.single()?;
        (settings, json!(source), vec![checks::verify(&inst)?])
    } else {
        let (recipe, settings) = args.recipe()?;
        exhaustive_guard(recipe.input_len(), cases.exhaustive)?;
        let opts = args.case_options(cases.trials, cases.exhaustive)?;
        let mut reports = Vec::new();
        for case in input_cases(recipe.input_len(), opts) {
            reports.push(checks::verify(&recipe.build(case.sa, case.sb)?)?);
        }
        let source = json!({
            "source": if cases.exhaustive { "exhaustive" } else { "random" },
            "seed": args.seed,
            "density": render_rational(&opts.density),
            "trials": cases.trials,
        });
        (settings, source, reports)
    };
    let passed = reports.iter().filter(|r| r.pass()).count();
    let all_pass = passed == reports.len();
    let mut report = json!({
        "command": "verify",
        "settings": settings,
        "input": source,
        "instances": reports.len(),
        "passed": passed,
        "failed": reports.len() - passed,
        "checks": tally(&reports),
        "all_pass": all_pass,
    });
    if single {
        report["report"] = json!(reports[0]);
    } else {
        let failures: Vec<&InstanceReport> = reports.iter().filter(|r| !r.pass()).take(MAX_LISTED_FAILURES).collect();
        report["failures"] = json!(failures);
    }
    write_json(out_path(out, &format!("verify-{}.json", file_stem(&settings))).as_deref(), &report)?;
    Ok(all_pass)
}

/// Runs a program and returns its outcome as JSON plus the outputs.
fn run_program<P>(
    inst: &Instance,
    prog: &P,
    params: &PublicParams,
    marks: Option<&[bool]>,
    cfg: SimConfig,
) -> Result<(Value, sim::RunOutcome<P::Output>)>
where
    P: NodeProgram,
    P::Output: Serialize,
{
    let outcome = sim::run(&inst.graph, prog, params, marks, cfg)?;
    let value = json!({
        "rounds_used": outcome.rounds_used,
        "terminated": outcome.terminated,
        "outputs": outcome.outputs,
        "output_rounds": outcome.output_rounds,
        "ledger": io::ledger_summary(&outcome.ledger, outcome.rounds_used, Some(inst)),
    });
    Ok((value, outcome))
}

fn simulate(
    args: &InstanceArgs,
    sim_args: &SimArgs,
    source: usize,
    dhat: Option<u64>,
    ledger_csv: Option<&Path>,
    out: &OutArgs,
) -> Result<bool> {
    let (inst, settings, input) = args.single()?;
    let g = &inst.graph;
    if g.is_weighted() {
        bail!("the programs count hops; simulate needs an unweighted instance");
    }
    let algo = sim_args.algo.unwrap_or(Algo::ApspDiameter);
    let mut cfg = SimConfig::for_graph(g);
    cfg.seed = args.seed;
    if let Some(b) = sim_args.b {
        cfg.b = b;
    }
    if let Some(r) = sim_args.max_rounds {
        cfg.max_rounds = r;
    }
    let mut params = reduction::public_params(&inst);
    let (mut value, ledger, oracle_ok) = match algo {
        Algo::BfsLayers => {
            if source >= g.n() {
                bail!("--source {source} is not a node (n = {})", g.n());
            }
            let (value, outcome) = run_program(&inst, &BfsLayers { source }, &params, None, cfg)?;
            let truth = distance::bfs_distances(g, source)?;
            let ok = (0..g.n()).all(|v| outcome.outputs[v] == truth.get(v).map(u64::from));
            (value, outcome.ledger, ok)
        }
        Algo::FloodMax => {
            if let Some(d) = dhat {
                params = params.with("dhat", d as i64);
            }
            let (value, outcome) = run_program(&inst, &FloodMax, &params, None, cfg)?;
            let top = (g.n() - 1) as u64;
            let ok = outcome.outputs.iter().all(|o| *o == Some(top));
            (value, outcome.ledger, ok)
        }
        Algo::ApspDiameter => {
            let (value, outcome) = run_program(&inst, &ApspDiameter, &params, None, cfg)?;
            let ecc = distance::eccentricities(g)?;
            let diam = ecc.iter().copied().max().unwrap_or(0) as u64;
            let ok = outcome
                .outputs
                .iter()
                .zip(&ecc)
                .all(|(o, &e)| o.is_some_and(|o| o.ecc == e as u64 && o.diameter == diam));
            (value, outcome.ledger, ok)
        }
        Algo::SpannerCheck => {
            let sp = spanner::params_of(&inst).ok_or_else(|| anyhow!("spanner-check needs a spanner instance"))?;
            let prog = SpannerCheck {
                alpha: sp.alpha,
                beta: sp.beta,
            };
            let mask = inst.h_mask();
            let (value, outcome) = run_program(&inst, &prog, &params, Some(&mask), cfg)?;
            let verdict = spanner::verify_instance(&inst)?;
            // true at a node means every inequality with that node as an endpoint holds
            let local_ok = outcome.outputs.iter().all(|o| *o == Some(true));
            let complete = outcome.outputs.iter().all(Option::is_some);
            (value, outcome.ledger, complete && local_ok == verdict.ok)
        }
    };
    if let Some(path) = ledger_csv {
        emit(Some(path), &io::ledger_csv(g, &ledger))?;
    }
    let terminated = value["terminated"].as_bool().unwrap_or(false);
    value["command"] = json!("simulate");
    value["algo"] = json!(algo);
    value["settings"] = json!(settings);
    value["input"] = json!(input);
    value["b"] = json!(cfg.b);
    value["max_rounds"] = json!(cfg.max_rounds);
    value["seed"] = json!(cfg.seed);
    value["oracle_agrees"] = json!(oracle_ok);
    let name = format!("simulate-{}-{}.json", file_stem(&settings), value["algo"].as_str().unwrap_or("algo"));
    write_json(out_path(out, &name).as_deref(), &value)?;
    Ok(terminated && oracle_ok)
}

fn reduce(args: &InstanceArgs, sim_args: &SimArgs, c_disj: &str, check_equivalence: bool, out: &OutArgs) -> Result<bool> {
    let (inst, settings, input) = args.single()?;
    let expected = if inst.construction() == Construction::Spanner {
        Algo::SpannerCheck
    } else {
        Algo::ApspDiameter
    };
    if let Some(a) = sim_args.algo.filter(|&a| a != expected) {
        bail!(
            "the reduction for {} runs {}, not {}",
            inst.construction(),
            json!(expected).as_str().unwrap_or_default(),
            json!(a).as_str().unwrap_or_default()
        );
    }
    let opts = ReduceOptions {
        b: sim_args.b,
        max_rounds: sim_args.max_rounds,
        c_disj: rational("c-disj", c_disj)?,
        check_equivalence,
    };
    let (report, equivalence) = reduction::reduce(&inst, opts)?;
    let ok = report.correct() && equivalence.as_ref().is_none_or(|e| e.holds());
    let body = json!({
        "command": "reduce",
        "algo": expected,
        "settings": settings,
        "input": input,
        "report": report,
        "equivalence": equivalence,
        "equivalence_holds": equivalence.as_ref().map(|e| e.holds()),
        "correct": report.correct(),
    });
    write_json(out_path(out, &format!("reduce-{}.json", file_stem(&settings))).as_deref(), &body)?;
    Ok(ok)
}

struct Grid {
    construction: Construction,
    ks: Vec<u32>,
    ps: Vec<u32>,
    shaved: bool,
    spanner: Option<lbkit::spanner::SpannerParams>,
}

impl Grid {
    fn recipes(&self) -> Vec<(Recipe, u32)> {
        let c = self.construction;
        let mut out = Vec::new();
        for &k in &self.ks {
            if let Some(sp) = &self.spanner {
                out.push((Recipe::Spanner(*sp, k), sp.p().unwrap_or(0)));
                continue;
            }
            let ps: &[u32] = if c.uses_p() { &self.ps } else { &[1] };
            for &p in ps {
                let params = ConstructionParams::new(k).with_p(p).shaved(self.shaved);
                out.push((Recipe::Distance(c, params), p));
            }
        }
        out
    }
}

#[derive(Serialize)]
struct GridCell {
    k: u32,
    #[serde(rename = "P")]
    p: u32,
    instances: usize,
    passed: usize,
    pass_rate: String,
}

fn sweep(grid: &Grid, opts: CaseOptions, csv: Option<PathBuf>, out: &OutArgs) -> Result<bool> {
    let c = grid.construction;
    if grid.shaved && !c.supports_shaved() {
        bail!("{c} has no shaved variant");
    }
    if opts.density < Rational::from_integer(0) || opts.density > Rational::from_integer(1) {
        bail!("--density must lie in [0, 1]");
    }
    let mut jobs = Vec::new();
    for (cell, (recipe, p)) in grid.recipes().into_iter().enumerate() {
        exhaustive_guard(recipe.input_len(), opts.exhaustive)?;
        let k = match &recipe {
            Recipe::Distance(_, params) => params.k,
            Recipe::Spanner(_, k) => *k,
        };
        // distinct seeds per cell keep the cells independent
        let cell_opts = CaseOptions {
            seed: opts.seed.wrapping_add(cell as u64),
            ..opts
        };
        for case in input_cases(recipe.input_len(), cell_opts) {
            jobs.push((cell, k, p, recipe.clone(), case));
        }
    }
    let results: Vec<(usize, u32, u32, InstanceReport)> = jobs
        .into_par_iter()
        .map(|(cell, k, p, recipe, case)| {
            let inst = recipe.build(case.sa, case.sb)?;
            Ok((cell, k, p, checks::verify(&inst)?))
        })
        .collect::<Result<_>>()?;

    let mut cells: BTreeMap<usize, GridCell> = BTreeMap::new();
    let mut csv_text = format!("{SWEEP_CSV_HEADER}\n");
    for (cell, k, p, r) in &results {
        let entry = cells.entry(*cell).or_insert(GridCell {
            k: *k,
            p: *p,
            instances: 0,
            passed: 0,
            pass_rate: String::new(),
        });
        entry.instances += 1;
        entry.passed += r.pass() as usize;
        csv_text.push_str(&checks::sweep_csv_row(r));
        csv_text.push('\n');
    }
    for cell in cells.values_mut() {
        let rate = Rational::new(cell.passed as i64, cell.instances.max(1) as i64);
        cell.pass_rate = render_rational(&rate);
    }
    let passed = results.iter().filter(|r| r.3.pass()).count();
    let all_pass = passed == results.len();

    let stem = format!("sweep-{c}");
    let report_path = out_path(out, &format!("{stem}.json"));
    let csv_path = csv.unwrap_or_else(|| match &report_path {
        Some(p) => p.with_extension("csv"),
        None => PathBuf::from(format!("{stem}.csv")),
    });
    emit(Some(&csv_path), csv_text.trim_end())?;
    let failures: Vec<&InstanceReport> = results
        .iter()
        .map(|r| &r.3)
        .filter(|r| !r.pass())
        .take(MAX_LISTED_FAILURES)
        .collect();
    let report = json!({
        "command": "sweep",
        "construction": c,
        "shaved": grid.shaved,
        "seed": opts.seed,
        "density": render_rational(&opts.density),
        "trials": opts.trials,
        "exhaustive": opts.exhaustive,
        "grid": cells.into_values().collect::<Vec<_>>(),
        "instances": results.len(),
        "passed": passed,
        "all_pass": all_pass,
        "csv": csv_path.display().to_string(),
        "failures": failures,
    });
    write_json(report_path.as_deref(), &report)?;
    Ok(all_pass)
}
