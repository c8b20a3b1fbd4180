//! `vasicek-shapes`: classify curve shapes, draw the state space and estimate
//! shape probabilities for a two-factor Vasicek parameter file.
//!
//! JSON goes to standard output; with `--out DIR` every command also writes
//! its files (`*.json`, `*.csv`, `*.svg`) into `DIR`. Exit codes: 0 success,
//! 2 config error, 3 assumption violation, 4 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use vasicek_envelope::classify::{eval_curve, ShortRateWitness};
use vasicek_envelope::coeffs::{assumption_report, AssumptionReport};
use vasicek_envelope::config::load_config;
use vasicek_envelope::decompose::{
    default_bbox, region_map, transition_graph, CatalogueRow, ConfigurationDescriptor, CATALOGUE,
};
use vasicek_envelope::geom::BBox;
use vasicek_envelope::stochastic::estimate_shape_probabilities;
use vasicek_envelope::svg::{curves_svg, state_space_svg};
use vasicek_envelope::{
    decompose, Classifier, CurveKind, Error, Line, ModelParams, Point, Result, SpecialPoints,
};

#[derive(Debug, Parser)]
#[command(name = "vasicek-shapes", version, about)]
struct Cli {
    /// Parameter file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the `curve` key of the config: forward or yield.
    #[arg(long, global = true)]
    curve: Option<String>,
    /// Directory for emitted files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shape of the curve at state (z1, z2).
    Classify {
        #[arg(allow_negative_numbers = true)]
        z1: f64,
        #[arg(allow_negative_numbers = true)]
        z2: f64,
    },
    /// Augmented envelope with its special points.
    Envelope,
    /// Constant-shape regions, transition graph and catalogue match.
    Decompose {
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        /// Plot window: x1 y1 x2 y2.
        #[arg(long = "box", num_args = 4, allow_negative_numbers = true, value_names = ["X1", "Y1", "X2", "Y2"])]
        bbox: Option<Vec<f64>>,
    },
    /// Monte Carlo shape probabilities under the stationary law.
    Probs {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Descriptor, catalogue match and assumption checks.
    Report {
        #[arg(long, default_value_t = 256)]
        resolution: usize,
    },
    /// Shapes attainable at a fixed short rate, with witness states.
    ShortRate {
        #[arg(long, allow_negative_numbers = true)]
        rate: f64,
        /// Extra uniform samples along the short-rate line.
        #[arg(long, default_value_t = 400)]
        scan: usize,
    },
}

#[derive(Serialize)]
struct MatchedRow {
    description: String,
    #[serde(flatten)]
    row: CatalogueRow,
}

#[derive(Serialize)]
struct Report {
    params: ModelParams,
    descriptor: ConfigurationDescriptor,
    matched_row: Option<MatchedRow>,
    assumptions: AssumptionReport,
}

#[derive(Serialize)]
struct EnvelopeSummary<'a> {
    kind: CurveKind,
    basepoint: Point,
    l0: Line,
    linf: Line,
    asymptotic_end: bool,
    clip_point: Option<Point>,
    scale: f64,
    body_points: usize,
    expected_regions: usize,
    special: &'a SpecialPoints,
}

#[derive(Serialize)]
struct ShortRateOutput {
    kind: CurveKind,
    rate: f64,
    count: usize,
    shapes: Vec<ShortRateWitness>,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output types serialize to JSON");
    s.push('\n');
    s
}

struct Output<'a> {
    dir: Option<&'a Path>,
}

impl Output<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(dir) = self.dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }

    /// JSON to standard output and, with `--out`, to `name`.
    fn json<T: Serialize>(&self, name: &str, v: &T) -> Result<()> {
        let s = to_json(v);
        print!("{s}");
        self.write(name, &s)
    }
}

fn bbox_from(v: &[f64]) -> Result<BBox> {
    let (a, b) = (Point::new(v[0], v[1]), Point::new(v[2], v[3]));
    let bb = BBox::from_points(&[a, b]).expect("two points");
    if !(bb.width() > 0.0 && bb.height() > 0.0) || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("--box {v:?} has no interior")));
    }
    Ok(bb)
}

fn row_of(d: &ConfigurationDescriptor) -> Option<MatchedRow> {
    d.matched_row.map(|i| {
        let row = CATALOGUE[i - 1];
        MatchedRow {
            description: row.regime.to_string(),
            row,
        }
    })
}

fn run(cli: Cli) -> Result<()> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let cfg = load_config(path)?;
    let kind = match &cli.curve {
        Some(s) => s.parse()?,
        None => cfg.curve,
    };
    let p = cfg.params;
    let out = Output {
        dir: cli.out.as_deref(),
    };
    match cli.command {
        Command::Classify { z1, z2 } => {
            let z = Point::new(z1, z2);
            if !z.z1.is_finite() || !z.z2.is_finite() {
                return Err(Error::Config("state must be finite".into()));
            }
            let r = Classifier::new(&p, kind)?.classify(&z)?;
            out.json("classify.json", &r)
        }
        Command::Envelope => {
            let c = Classifier::new(&p, kind)?;
            let env = c.envelope();
            out.write("envelope.csv", &env.to_csv())?;
            out.write(
                "envelope.svg",
                &state_space_svg(env, None, &default_bbox(env)),
            )?;
            let summary = EnvelopeSummary {
                kind,
                basepoint: env.basepoint,
                l0: env.l0,
                linf: env.linf,
                asymptotic_end: env.asymptotic_end,
                clip_point: env.clip_point,
                scale: env.scale,
                body_points: env.body.len(),
                expected_regions: env.special.expected_regions(),
                special: &env.special,
            };
            out.json("envelope.json", &summary)
        }
        Command::Decompose { resolution, bbox } => {
            let c = Classifier::new(&p, kind)?;
            let d = decompose(&c, resolution)?;
            let map = match bbox {
                Some(v) => region_map(&c, bbox_from(&v)?, resolution)?,
                None => d.map.clone(),
            };
            out.write("regions.csv", &map.to_csv(1))?;
            out.write(
                "regions.svg",
                &state_space_svg(c.envelope(), Some(&map), &map.bbox),
            )?;
            out.write("graph.json", &to_json(&transition_graph(&map)))?;
            out.json("descriptor.json", &d.descriptor)
        }
        Command::Probs { samples, seed } => {
            if samples == 0 {
                return Err(Error::Config("--samples must be positive".into()));
            }
            let r = estimate_shape_probabilities(&p, kind, samples, seed)?;
            out.json("probs.json", &r)
        }
        Command::Report { resolution } => {
            let c = Classifier::new(&p, kind)?;
            let d = decompose(&c, resolution)?;
            let report = Report {
                params: p,
                matched_row: row_of(&d.descriptor),
                descriptor: d.descriptor,
                assumptions: assumption_report(&p, kind),
            };
            out.json("report.json", &report)
        }
        Command::ShortRate { rate, scan } => {
            if !rate.is_finite() {
                return Err(Error::Config("--rate must be finite".into()));
            }
            let c = Classifier::new(&p, kind)?;
            let shapes = c.shapes_for_short_rate(rate, scan);
            let horizon = 8.0 / p.lambda1();
            let xs: Vec<f64> = (0..=400).map(|k| horizon * k as f64 / 400.0).collect();
            let mut series = Vec::new();
            for w in &shapes {
                // deviation from the short rate, scaled to unit height so
                // that shapes near M stay visible next to large ones
                let ys = eval_curve(&p, kind, &w.z, &xs)?;
                let amp = ys.iter().map(|y| (y - rate).abs()).fold(0.0, f64::max);
                let amp = if amp > 0.0 { amp } else { 1.0 };
                let pts = xs.iter().zip(&ys).map(|(&x, &y)| (x, (y - rate) / amp));
                series.push((w.label.code(), pts.collect()));
            }
            let ylabel = format!("({kind} - r) / max |{kind} - r|");
            out.write("short_rate.svg", &curves_svg(&series, "maturity", &ylabel))?;
            let o = ShortRateOutput {
                kind,
                rate,
                count: shapes.len(),
                shapes,
            };
            out.json("short_rate.json", &o)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vasicek-shapes: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
