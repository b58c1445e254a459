use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Subcommand};

use super::{usage, write_file, CliResult, Context, InputArgs, Switch};
use crate::evaluation::{MetricReport, Task};
use crate::graph::{Graph, NormalizedOperator};
use crate::matrix::DenseMatrix;
use crate::smoothing::{
    degree_quantile, mixing_time_bound, smoothing_speed_report, spectral_info, theorem1_bound,
    DegreeBucket, DistanceMode, SmoothingStream, Weighting,
};

#[derive(Debug, Subcommand)]
pub enum DiagnoseCommand {
    /// Mean distance to the stationary state per degree bucket and step.
    Distances(DistancesArgs),
    /// Per-node distance against the geometric decay bound.
    Theorem1(Theorem1Args),
    /// Per-node first step within epsilon against the closed-form bound.
    MixingTime(MixingArgs),
}

/// Input and output flags shared by the diagnostics.
#[derive(Debug, Args)]
pub struct DiagnoseIo {
    #[command(flatten)]
    pub input: InputArgs,
    /// L2-normalize input feature rows first.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub normalize_rows: Switch,
    /// CSV table output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistancesArgs {
    #[command(flatten)]
    pub io: DiagnoseIo,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    /// Ascending degree thresholds t1,t2,...; buckets are [0, t1), [t1, t2),
    /// ..., [t_last, ∞). Default: bottom and top degree decile.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct Theorem1Args {
    #[command(flatten)]
    pub io: DiagnoseIo,
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
}

#[derive(Debug, Args)]
pub struct MixingArgs {
    #[command(flatten)]
    pub io: DiagnoseIo,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Steps searched for the empirical first step within epsilon.
    #[arg(long, default_value_t = 200)]
    pub horizon: usize,
}

pub(super) fn run(ctx: &Context, cmd: &DiagnoseCommand) -> CliResult<()> {
    match cmd {
        DiagnoseCommand::Distances(a) => distances(ctx, a),
        DiagnoseCommand::Theorem1(a) => theorem1(ctx, a),
        DiagnoseCommand::MixingTime(a) => mixing(ctx, a),
    }
}

impl DiagnoseIo {
    fn load(&self, ctx: &Context) -> CliResult<(Graph, DenseMatrix)> {
        if self.out.is_none() && self.report.is_none() && !ctx.stdout {
            return usage("nowhere to write: pass --out, --report, or --stdout");
        }
        let input = self.input.load()?;
        let x = if self.normalize_rows.is_on() {
            input.features.l2_row_normalized()
        } else {
            input.features
        };
        Ok((input.graph, x))
    }

    /// CSV to `--out` and, with `--stdout`, to standard output; the JSON
    /// summary to `--report`.
    fn finish(&self, ctx: &Context, csv: &str, report: &mut MetricReport) -> CliResult<()> {
        self.input.echo(report);
        report.config("normalize_rows", self.normalize_rows.is_on());
        ctx.echo_timing(report);
        if let Some(p) = &self.out {
            write_file(p, csv.as_bytes())?;
        }
        if let Some(p) = &self.report {
            write_file(p, crate::dataio::report_json(report)?.as_bytes())?;
        }
        if ctx.stdout {
            print!("{csv}");
        }
        Ok(())
    }
}

fn buckets_for(g: &Graph, thresholds: Option<&[usize]>) -> CliResult<Vec<DegreeBucket>> {
    match thresholds {
        None => Ok(vec![
            DegreeBucket::new(0, degree_quantile(g, 0.1)),
            DegreeBucket::new(degree_quantile(g, 0.9), usize::MAX),
        ]),
        Some(t) => {
            if t.is_empty() || t.windows(2).any(|w| w[0] >= w[1]) || t[0] == 0 {
                return usage("--thresholds must be positive and strictly increasing");
            }
            let mut out = vec![DegreeBucket::new(0, t[0] - 1)];
            for w in t.windows(2) {
                out.push(DegreeBucket::new(w[0], w[1] - 1));
            }
            out.push(DegreeBucket::new(t[t.len() - 1], usize::MAX));
            Ok(out)
        }
    }
}

fn bucket_label(b: &DegreeBucket) -> String {
    if b.max_degree == usize::MAX {
        format!("deg_{}_plus", b.min_degree)
    } else {
        format!("deg_{}_{}", b.min_degree, b.max_degree)
    }
}

fn distances(ctx: &Context, a: &DistancesArgs) -> CliResult<()> {
    let (g, x) = a.io.load(ctx)?;
    let buckets = buckets_for(&g, a.thresholds.as_deref())?;
    let (curves, secs) = ctx.timed(|| smoothing_speed_report(&g, &x, a.r, a.k_max, &buckets));
    let curves = curves?;

    let mut csv = String::from("k");
    for c in &curves {
        write!(csv, ",{}", bucket_label(&c.bucket)).unwrap();
    }
    csv.push('\n');
    for k in 0..=a.k_max {
        write!(csv, "{k}").unwrap();
        for c in &curves {
            match &c.mean_distance {
                Some(d) => write!(csv, ",{}", d[k]).unwrap(),
                None => csv.push(','),
            }
        }
        csv.push('\n');
    }

    let mut report = MetricReport::new(Task::Diagnose);
    report
        .config("diagnostic", "distances")
        .config("r", a.r)
        .config("k_max", a.k_max);
    for c in &curves {
        report.diagnostic(
            &format!("{}_nodes", bucket_label(&c.bucket)),
            c.nodes as f64,
        );
    }
    report.runtime_seconds = secs;
    a.io.finish(ctx, &csv, &mut report)
}

/// Euclid-stationary distances of `Â_0` smoothing, `n × (k_max + 1)`.
fn stationary_distances(g: &Graph, x: &DenseMatrix, k_max: usize) -> CliResult<DenseMatrix> {
    let op = NormalizedOperator::new(g, 0.0)?;
    let mut stream = SmoothingStream::new(
        &op,
        x.clone(),
        DistanceMode::EuclidStationary,
        Weighting::SingleHop,
    )?;
    stream.advance_to(k_max)?;
    Ok(stream.profile()?.distances)
}

fn theorem1(ctx: &Context, a: &Theorem1Args) -> CliResult<()> {
    let (g, x) = a.io.load(ctx)?;
    let (result, secs) = ctx.timed(|| -> CliResult<_> {
        let spectral = spectral_info(&g, &x)?;
        let bounds = (0..=a.k_max)
            .map(|k| theorem1_bound(&g, &x, &spectral, k))
            .collect::<crate::Result<Vec<_>>>()?;
        Ok((spectral, bounds, stationary_distances(&g, &x, a.k_max)?))
    });
    let (spectral, bounds, dist) = result?;

    let mut csv = String::from("node,degree,k,distance,bound,violated\n");
    let mut violations = 0usize;
    let mut worst_ratio = 0.0f64;
    for i in 0..g.node_count() {
        for (k, b) in bounds.iter().enumerate() {
            let d = dist.get(i, k);
            let violated = d > b[i];
            violations += violated as usize;
            if b[i] > 0.0 {
                worst_ratio = worst_ratio.max(d / b[i]);
            }
            writeln!(
                csv,
                "{i},{},{k},{d},{},{}",
                g.degree(i),
                b[i],
                violated as u8
            )
            .unwrap();
        }
    }
    eprintln!("theorem1: {violations} violations");

    let mut report = MetricReport::new(Task::Diagnose);
    report
        .config("diagnostic", "theorem1")
        .config("k_max", a.k_max);
    report
        .diagnostic("violations", violations as f64)
        .diagnostic("max_distance_to_bound_ratio", worst_ratio)
        .diagnostic("lambda2", spectral.lambda2)
        .diagnostic("lambda_min", spectral.lambda_min)
        .diagnostic("decay_rate", spectral.decay_rate());
    report.runtime_seconds = secs;
    a.io.finish(ctx, &csv, &mut report)
}

fn mixing(ctx: &Context, a: &MixingArgs) -> CliResult<()> {
    let (g, x) = a.io.load(ctx)?;
    let (result, secs) = ctx.timed(|| -> CliResult<_> {
        let spectral = spectral_info(&g, &x)?;
        let bounds = mixing_time_bound(&g, &x, &spectral, a.epsilon)?;
        Ok((bounds, stationary_distances(&g, &x, a.horizon)?))
    });
    let (bounds, dist) = result?;

    let mut csv = String::from("node,degree,empirical_step,bound\n");
    let mut exceeded = 0usize;
    let mut unresolved = 0usize;
    for (i, &bound) in bounds.iter().enumerate() {
        let first = (0..=a.horizon).find(|&k| dist.get(i, k) <= a.epsilon);
        match first {
            Some(k) => {
                exceeded += (k > bound) as usize;
                writeln!(csv, "{i},{},{k},{bound}", g.degree(i)).unwrap();
            }
            None => {
                unresolved += 1;
                writeln!(csv, "{i},{},,{bound}", g.degree(i)).unwrap();
            }
        }
    }
    eprintln!("mixing-time: {exceeded} nodes above the bound, {unresolved} beyond the horizon");

    let mut report = MetricReport::new(Task::Diagnose);
    report
        .config("diagnostic", "mixing-time")
        .config("epsilon", a.epsilon)
        .config("horizon", a.horizon);
    report
        .diagnostic("exceeded", exceeded as f64)
        .diagnostic("unresolved", unresolved as f64)
        .diagnostic(
            "max_bound",
            bounds.iter().copied().max().unwrap_or(0) as f64,
        );
    report.runtime_seconds = secs;
    a.io.finish(ctx, &csv, &mut report)
}
