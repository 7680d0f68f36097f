//! The two built-in experiments, the benchmark that runs every case under every
//! scheme, and the CSV writers for traces and regularization paths.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::problem::{build_example1, build_example2, SviProblem};
use crate::solver::{run, IterationTrace, PathReport, Schedule, SolveResult, SolverConfig, Variant};

/// Truncation dimension used for the sequence-space experiment by default.
pub const DEFAULT_DIM: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    /// Sequence-space problem, residual stopping at `1e-6`.
    One,
    /// ℓ1-regularized quadratic pair, distance stopping at `1e-4`.
    Two,
}

impl Experiment {
    pub fn cases(self) -> [Case; 4] {
        match self {
            Experiment::One => [Case::Ia, Case::Ib, Case::Ic, Case::Id],
            Experiment::Two => [Case::IIa, Case::IIb, Case::IIc, Case::IId],
        }
    }

    pub fn problem(self, dim: usize) -> Result<SviProblem> {
        match self {
            Experiment::One => build_example1(dim),
            Experiment::Two => Ok(build_example2()),
        }
    }

    pub fn schedule(self) -> Schedule {
        match self {
            Experiment::One => Schedule::example1(),
            Experiment::Two => Schedule::example2(),
        }
    }

    pub fn solver_config(self, variant: Variant) -> SolverConfig {
        match self {
            Experiment::One => SolverConfig::example1(variant),
            Experiment::Two => SolverConfig::example2(variant),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Experiment::One => 1,
            Experiment::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Experiment::One),
            2 => Ok(Experiment::Two),
            _ => Err(Error::Config(format!("table must be 1 or 2, got {n}"))),
        }
    }
}

/// Named starting points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    Ia,
    Ib,
    Ic,
    Id,
    IIa,
    IIb,
    IIc,
    IId,
}

impl Case {
    pub fn experiment(self) -> Experiment {
        match self {
            Case::Ia | Case::Ib | Case::Ic | Case::Id => Experiment::One,
            _ => Experiment::Two,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Ia => "Ia",
            Case::Ib => "Ib",
            Case::Ic => "Ic",
            Case::Id => "Id",
            Case::IIa => "IIa",
            Case::IIb => "IIb",
            Case::IIc => "IIc",
            Case::IId => "IId",
        }
    }

    /// Starting point. The first four are geometric sequences truncated to
    /// `dim` entries; `dim` is ignored for the three-dimensional cases.
    pub fn initial_point(self, dim: usize) -> Vector {
        let geometric = |first: f64, ratio: f64| Vector::from_fn(dim, |i| first * ratio.powi(i as i32));
        match self {
            Case::Ia => geometric(16.0, 0.25),
            Case::Ib => geometric(9.0, 1.0 / 3.0),
            Case::Ic => geometric(100.0, -0.1),
            Case::Id => geometric(-20.0, -0.2),
            Case::IIa => [1.0, -2.0, 16.0].into(),
            Case::IIb => [15.0, 9.0, 0.0].into(),
            Case::IIc => [1.0, 0.0, 6.0].into(),
            Case::IId => [11.0, 1.0, -3.0].into(),
        }
    }

    /// Published iteration counts for regularized / forward-backward / Moudafi.
    pub fn reference_iterations(self) -> [usize; 3] {
        match self {
            Case::Ia => [16, 31, 32],
            Case::Ib => [16, 30, 31],
            Case::Ic => [18, 34, 35],
            Case::Id => [16, 31, 32],
            Case::IIa => [58, 71, 77],
            Case::IIb => [52, 65, 71],
            Case::IIc => [52, 65, 71],
            Case::IId => [66, 78, 85],
        }
    }

    pub fn reference_for(self, variant: Variant) -> usize {
        let r = self.reference_iterations();
        match variant {
            Variant::Regularized => r[0],
            Variant::ForwardBackward => r[1],
            Variant::Moudafi => r[2],
        }
    }
}

impl FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Ia" => Case::Ia,
            "Ib" => Case::Ib,
            "Ic" => Case::Ic,
            "Id" => Case::Id,
            "IIa" => Case::IIa,
            "IIb" => Case::IIb,
            "IIc" => Case::IIc,
            "IId" => Case::IId,
            other => return Err(Error::Config(format!("unknown initial point preset '{other}'"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchCell {
    pub case: Case,
    pub variant: Variant,
    pub result: SolveResult,
    pub wall: Duration,
}

impl BenchCell {
    pub fn reference(&self) -> usize {
        self.case.reference_for(self.variant)
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub experiment: Experiment,
    pub dim: usize,
    pub cells: Vec<BenchCell>,
    pub total_wall: Duration,
}

impl BenchReport {
    pub fn cell(&self, case: Case, variant: Variant) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.case == case && c.variant == variant)
    }

    /// Plain-text table: one block per case, one column per scheme.
    pub fn render(&self) -> String {
        let cfg = self.experiment.solver_config(Variant::Regularized);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Table {}: {} | tol {:e} | stop {:?} | check {:?}",
            self.experiment.number(),
            match self.experiment {
                Experiment::One => format!("example1 (dim={})", self.dim),
                Experiment::Two => "example2".to_string(),
            },
            cfg.tol,
            cfg.stop_rule,
            cfg.stop_check,
        );
        let _ = writeln!(
            out,
            "{:<6} {:<12} {:>18} {:>18} {:>18}",
            "case", "", "regularized", "forward_backward", "moudafi"
        );
        for case in self.experiment.cases() {
            let cells: Vec<&BenchCell> = Variant::ALL.iter().filter_map(|&v| self.cell(case, v)).collect();
            let row = |label: &str, f: &dyn Fn(&BenchCell) -> String| {
                let mut line = format!(
                    "{:<6} {:<12}",
                    if label == "iterations" { case.name() } else { "" },
                    label
                );
                for c in &cells {
                    line.push_str(&format!(" {:>18}", f(c)));
                }
                line
            };
            let _ = writeln!(
                out,
                "{}",
                row("iterations", &|c| {
                    if c.result.converged {
                        c.result.iterations.to_string()
                    } else {
                        format!("{}*", c.result.iterations)
                    }
                })
            );
            let _ = writeln!(out, "{}", row("reference", &|c| c.reference().to_string()));
            let _ = writeln!(out, "{}", row("final_tol", &|c| format!("{:.3e}", c.result.final_tol)));
            let _ = writeln!(
                out,
                "{}",
                row("wall_ms", &|c| format!("{:.3}", c.wall.as_secs_f64() * 1e3))
            );
        }
        if self.cells.iter().any(|c| !c.result.converged) {
            let _ = writeln!(out, "* did not converge within max_iter");
        }
        let _ = writeln!(out, "total wall time: {:.3} ms", self.total_wall.as_secs_f64() * 1e3);
        out
    }
}

/// Run every case of an experiment under every scheme. The twelve runs are
/// independent and execute on scoped threads.
pub fn run_bench(experiment: Experiment, dim: usize) -> Result<BenchReport> {
    let started = Instant::now();
    let problem = experiment.problem(dim)?;
    let schedule = experiment.schedule();
    let jobs: Vec<(Case, Variant)> = experiment
        .cases()
        .into_iter()
        .flat_map(|c| Variant::ALL.into_iter().map(move |v| (c, v)))
        .collect();
    let cells: Result<Vec<BenchCell>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(case, variant)| {
                let problem = &problem;
                let schedule = &schedule;
                scope.spawn(move || {
                    let t = Instant::now();
                    let cfg = experiment.solver_config(variant);
                    let result = run(problem, schedule, &cfg, &case.initial_point(problem.n1()))?;
                    Ok(BenchCell {
                        case,
                        variant,
                        result,
                        wall: t.elapsed(),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench job panicked"))
            .collect()
    });
    Ok(BenchReport {
        experiment,
        dim: problem.n1(),
        cells: cells?,
        total_wall: started.elapsed(),
    })
}

pub const TRACE_HEADER: &str = "iter,tol,step_norm,alpha_n,lambda_n,dist_to_known,elapsed_ms";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Write a trace as CSV. `elapsed_ms` is left empty unless `timing` is set,
/// which keeps repeated runs byte-identical.
pub fn write_trace_csv(out: &mut impl Write, trace: &IterationTrace, timing: bool) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in &trace.rows {
        let elapsed = if timing {
            format!("{:.6}", r.elapsed.as_secs_f64() * 1e3)
        } else {
            String::new()
        };
        writeln!(
            out,
            "{},{:e},{:e},{},{:e},{},{}",
            r.n,
            r.tol_value,
            r.step_norm,
            opt(r.alpha_n),
            r.lambda_n,
            opt(r.dist_to_known),
            elapsed
        )?;
    }
    Ok(())
}

pub const PATH_HEADER: &str = "alpha,dist_to_known,ratio,converged";

pub fn write_path_csv(out: &mut impl Write, report: &PathReport) -> io::Result<()> {
    writeln!(out, "{PATH_HEADER}")?;
    for pt in &report.points {
        writeln!(
            out,
            "{:e},{},{},{}",
            pt.alpha,
            opt(pt.dist_to_known),
            opt(pt.ratio),
            pt.solution.converged
        )?;
    }
    Ok(())
}

/// File name used for a bench trace, e.g. `table1_Ia_regularized.csv`.
pub fn trace_file_name(cell: &BenchCell, experiment: Experiment) -> String {
    format!(
        "table{}_{}_{}.csv",
        experiment.number(),
        cell.case.name(),
        cell.variant.name()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_points() {
        let z = Case::Ia.initial_point(5);
        assert_eq!(z.as_slice(), &[16.0, 4.0, 1.0, 0.25, 0.0625]);
        let z = Case::Id.initial_point(4);
        let expected = [-20.0, 4.0, -0.8, 0.16];
        for (a, b) in z.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let z = Case::Ic.initial_point(4);
        assert!((z[3] + 0.1).abs() < 1e-15);
        assert_eq!(Case::IIb.initial_point(200).as_slice(), &[15.0, 9.0, 0.0]);
        assert_eq!("IIc".parse::<Case>().unwrap(), Case::IIc);
        assert!("IIe".parse::<Case>().is_err());
    }

    #[test]
    fn trace_csv_layout() {
        let p = build_example2();
        let res = run(
            &p,
            &Schedule::example2(),
            &SolverConfig {
                max_iter: 2,
                ..SolverConfig::example2(Variant::Moudafi)
            },
            &Case::IIa.initial_point(3),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &res.trace, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines.len(), 3);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], "1");
        assert_eq!(fields[3], "");
        assert_eq!(fields[6], "");
        assert!(fields[5].parse::<f64>().is_ok());
    }
}
