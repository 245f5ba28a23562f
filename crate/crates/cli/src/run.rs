//! Subcommand bodies: run a study, write its CSV files.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use ewi_core::harness::acceptance::run_all;
use ewi_core::harness::csv::{format_number, plot_script, write_rows, write_text, CsvRow};
use ewi_core::harness::data::builtin_initial_data;
use ewi_core::harness::reference::ReferenceCache;
use ewi_core::harness::spec::{StudyKind, StudySpec};
use ewi_core::harness::studies::{
    run_energy_study, run_field_dump_2d, run_long_time_study, run_oscillatory_table, run_spatial_study,
    run_temporal_study,
};
use ewi_core::solver::rescale_state;
use ewi_core::{inverse_transform, solve_oscillatory, Regime, SolveConfig};

pub struct Output {
    pub dir: PathBuf,
    pub full_precision: bool,
    pub plot: bool,
}

impl Output {
    pub fn prepare(&self) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("cannot create output directory {}", self.dir.display()))?;
        let probe = self.dir.join(".ewi-write-test");
        fs::write(&probe, b"").with_context(|| format!("output directory {} is not writable", self.dir.display()))?;
        let _ = fs::remove_file(probe);
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn rows(&self, name: &str, rows: &[CsvRow]) -> Result<()> {
        write_rows(&self.path(name), rows, self.full_precision)?;
        println!("wrote {}", self.path(name).display());
        Ok(())
    }

    fn text(&self, name: &str, contents: &str) -> Result<()> {
        write_text(&self.path(name), contents)?;
        println!("wrote {}", self.path(name).display());
        Ok(())
    }

    /// Gnuplot sidecar; columns are 1-based in the fixed schema.
    fn plot(&self, csv: &str, x: usize, y: usize, logscale: &str, title: &str) -> Result<()> {
        if self.plot {
            let name = format!("{}.gp", csv.trim_end_matches(".csv"));
            self.text(&name, &plot_script(csv, x, y, logscale, title))?;
        }
        Ok(())
    }

    fn cache(&self) -> ReferenceCache {
        ReferenceCache::on_disk(self.path("references"))
    }
}

// Column numbers in the fixed CSV schema.
const COL_TAU: usize = 5;
const COL_N: usize = 6;
const COL_T: usize = 7;
const COL_E1: usize = 8;
const COL_E1_MAX: usize = 9;
const COL_ENERGY: usize = 11;

fn tag(x: f64) -> String {
    format!("{x}").replace('.', "p")
}

pub fn check(output: &Output) -> Result<ExitCode> {
    let cache = if output.dir.exists() {
        output.cache()
    } else {
        ReferenceCache::in_memory()
    };
    let outcomes = run_all(&cache);
    for outcome in &outcomes {
        println!("{outcome}");
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    Ok(if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

pub fn solve(spec: &StudySpec, stride: usize, output: &Output) -> Result<()> {
    let alpha = spec.alphas[0];
    let eps = spec.eps[0];
    let tau = spec.steps[0];
    let params = spec.cell_params(alpha, eps)?;
    let t_final = spec.t_final.unwrap_or(1.0);
    let grid = spec.data.grid(&spec.sizes)?;
    let initial = builtin_initial_data(&spec.data, &grid)?;
    let mut cfg = SolveConfig::new(params, tau, t_final);
    cfg.snapshot_stride = stride;
    cfg.record_energy = true;
    let traj = if params.regime == Regime::Oscillatory {
        solve_oscillatory(&cfg, &rescale_state(&initial, params.coupling(), false))?
    } else {
        ewi_core::solve(&cfg, &initial)?
    };
    let iters = traj.max_iterations();
    let rows: Vec<CsvRow> = traj
        .energy
        .iter()
        .map(|r| CsvRow {
            alpha,
            beta: params.beta,
            eps,
            p: params.p,
            tau,
            n: grid.len(),
            t_final: r.time,
            energy_dev: Some(r.relative_deviation),
            iters_max: Some(iters),
            ..Default::default()
        })
        .collect();
    output.rows("solve.csv", &rows)?;
    output.plot("solve.csv", COL_T, COL_ENERGY, "y", "relative energy deviation")?;

    let values = inverse_transform(&traj.final_state.psi);
    let f = |x: f64| format_number(x, output.full_precision);
    let mut field = String::from(if grid.dims() == 1 { "x,re,im\n" } else { "x,y,re,im\n" });
    for (k, v) in values.iter().enumerate() {
        let node = grid.node_of(k);
        if grid.dims() == 1 {
            field.push_str(&format!("{},{},{}\n", f(node[0]), f(v.re), f(v.im)));
        } else {
            field.push_str(&format!("{},{},{},{}\n", f(node[0]), f(node[1]), f(v.re), f(v.im)));
        }
    }
    output.text("solve_field.csv", &field)?;
    println!(
        "t = {}: max energy deviation {:.3e}, max Picard iterations {iters}",
        traj.final_state.time,
        traj.max_energy_deviation()
    );
    Ok(())
}

pub fn converge_time(spec: &StudySpec, output: &Output) -> Result<()> {
    let curves = run_temporal_study(spec, &output.cache())?;
    let rows: Vec<CsvRow> = curves.iter().flat_map(|c| c.rows(spec.params.beta)).collect();
    for c in &curves {
        println!("alpha={} eps={} reference {}", c.alpha, c.eps, &c.reference_checksum[..16]);
    }
    output.rows("converge_time.csv", &rows)?;
    output.plot("converge_time.csv", COL_TAU, COL_E1, "xy", "temporal error")
}

pub fn converge_space(spec: &StudySpec, output: &Output) -> Result<()> {
    let curves = run_spatial_study(spec, &output.cache())?;
    let rows: Vec<CsvRow> = curves
        .iter()
        .flat_map(|c| c.rows(spec.params.beta, spec.params.p))
        .collect();
    output.rows("converge_space.csv", &rows)?;
    output.plot("converge_space.csv", COL_N, COL_E1, "y", "spatial error")
}

pub fn long_time(spec: &StudySpec, output: &Output) -> Result<()> {
    let study = run_long_time_study(spec)?;
    output.rows("long_time.csv", &study.rows(spec.params.beta, spec.params.p))?;
    let mut ratios = String::from("alpha,eps,eps_next,ratio\n");
    let f = |x: f64| format_number(x, output.full_precision);
    for r in &study.ratios {
        ratios.push_str(&format!(
            "{},{},{},{}\n",
            f(r.alpha),
            f(r.eps),
            f(r.eps_next),
            r.ratio.map(f).unwrap_or_else(|| "nan".into())
        ));
        println!(
            "alpha={} e1_max({})/e1_max({}) = {}",
            r.alpha,
            r.eps,
            r.eps_next,
            r.ratio.map(|v| format!("{v:.3}")).unwrap_or("-".into())
        );
    }
    for c in study.curves.iter().filter(|c| c.truncated) {
        println!("alpha={} eps={}: horizon truncated to {}", c.alpha, c.eps, c.horizon);
    }
    output.text("long_time_ratios.csv", &ratios)?;
    output.plot("long_time.csv", COL_T, COL_E1_MAX, "xy", "long-time error")
}

pub fn energy(spec: &StudySpec, output: &Output) -> Result<()> {
    let series = run_energy_study(spec)?;
    for s in &series {
        println!(
            "alpha={} tau={}: max deviation {:.3e}{}",
            s.alpha,
            s.tau,
            s.max_deviation,
            s.order.map(|o| format!(", order {o:.2}")).unwrap_or_default()
        );
    }
    let rows: Vec<CsvRow> = series
        .iter()
        .flat_map(|s| s.rows(spec.params.beta, spec.params.p))
        .collect();
    output.rows("energy.csv", &rows)?;
    output.plot("energy.csv", COL_T, COL_ENERGY, "y", "relative energy deviation")
}

pub fn oscillatory_table(spec: &StudySpec, output: &Output) -> Result<()> {
    let tables = run_oscillatory_table(spec, &output.cache())?;
    let mut rows = Vec::new();
    let mut checksums = String::from("alpha,eps,reference_sha256\n");
    for table in &tables {
        rows.extend(table.rows());
        let name = format!("oscillatory_table_alpha{}.csv", tag(table.alpha));
        let layout = table.layout_csv(output.full_precision);
        print!("alpha = {}\n{layout}", table.alpha);
        output.text(&name, &layout)?;
        for (eps, sum) in table.eps.iter().zip(&table.reference_checksums) {
            checksums.push_str(&format!("{},{},{sum}\n", table.alpha, eps));
        }
    }
    output.rows("oscillatory_table.csv", &rows)?;
    output.text("oscillatory_table_references.csv", &checksums)?;
    output.plot("oscillatory_table.csv", COL_TAU, COL_E1, "xy", "oscillatory temporal error")
}

pub fn dump_2d(spec: &StudySpec, output: &Output) -> Result<()> {
    debug_assert_eq!(spec.kind, StudyKind::FieldDump2d);
    for d in run_field_dump_2d(spec)? {
        let name = format!("dump_alpha{}_t{}.csv", tag(d.alpha), tag(d.time));
        output.text(&name, &d.to_csv(output.full_precision))?;
        println!(
            "alpha={} t={}: max |Im psi| {:.2e}, energy deviation {:.2e}",
            d.alpha, d.time, d.max_imag, d.energy_deviation
        );
        if output.plot {
            let script = format!(
                "set datafile separator ','\nset view map\nset title 'psi, alpha={} t={}'\nsplot '{}' using 1:2:3 with image\n",
                d.alpha, d.time, name
            );
            output.text(&format!("{}.gp", name.trim_end_matches(".csv")), &script)?;
        }
    }
    Ok(())
}
