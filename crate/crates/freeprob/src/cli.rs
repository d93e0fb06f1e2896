//! Command-line front end: `check`, `cumulants`, `density`, `transform`.
//!
//! Exit codes: 0 = pass/consistent, 1 = fail with witness, 2 = inconclusive,
//! 3 = usage error. A report is always written on exits 0-2. Reports embed
//! the full effective configuration and render floats at fixed width, so
//! identical configurations produce byte-identical output.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::checkers::{
    fid_grid_check, fsd_grid_check, kerov_check, CheckOptions, Half, HalfPlaneGrid,
};
use crate::cumulants::{
    fid_cumulant_criterion, free_cumulants_from_moments, fsd_cumulant_criterion,
};
use crate::error::{Error, Result};
use crate::levy::fsd_monotonicity_check;
use crate::measures::{catalog_lookup, measure_from_json, MeasureSpec, ParamRecord};
use crate::rat::{rat_display, rat_i64};
use crate::report::{to_json_string, Verdict};
use crate::transforms::{
    cauchy_eval, free_cumulant_transform_derivative_eval, free_cumulant_transform_eval,
    invert_reciprocal_cauchy, reciprocal_cauchy_eval, stieltjes_density, voiculescu_eval,
    EvalMethod, TransformOptions, TransformValue,
};

#[derive(Parser, Debug)]
#[command(
    name = "freeprob",
    about = "Free-probability transforms and free infinite divisibility / selfdecomposability checks",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run FID/FSD checks on a measure and write a verdict report.
    Check(CheckArgs),
    /// Exact moments, free cumulants, and Hankel positivity verdicts.
    Cumulants(CumulantsArgs),
    /// Tabulate a density over a real grid.
    Density(DensityArgs),
    /// Evaluate a single transform at a complex point.
    Transform(TransformArgs),
}

#[derive(Args, Debug, Clone)]
pub struct MeasureArgs {
    /// Catalog distribution name (semicircle, free_meixner, free_poisson,
    /// free_gamma, free_stable, gaussian, awk, dirac, bernoulli, student_t3).
    #[arg(long)]
    pub catalog: Option<String>,
    /// Measure JSON file (tagged representations).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// key=value parameter record, e.g. "a=0,r=2" (merged with the flags below).
    #[arg(long)]
    pub params: Option<String>,

    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub cprime: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
}

impl MeasureArgs {
    fn param_record(&self) -> Result<ParamRecord> {
        let mut rec: ParamRecord = match &self.params {
            Some(s) => s.parse()?,
            None => ParamRecord::new(),
        };
        for (k, v) in [
            ("a", self.a),
            ("b", self.b),
            ("r", self.r),
            ("c", self.c),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("cprime", self.cprime),
            ("eta", self.eta),
            ("xi", self.xi),
            ("sigma2", self.sigma2),
        ] {
            if let Some(v) = v {
                rec.set(k, v);
            }
        }
        Ok(rec)
    }

    pub fn resolve(&self) -> Result<MeasureSpec> {
        match (&self.catalog, &self.input) {
            (Some(_), Some(_)) => Err(Error::Usage(
                "give exactly one of --catalog and --input".into(),
            )),
            (None, None) => Err(Error::Usage(
                "a measure is required: --catalog NAME or --input FILE".into(),
            )),
            (Some(name), None) => catalog_lookup(name, &self.param_record()?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
                let v: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| Error::Usage(format!("bad JSON in {}: {e}", path.display())))?;
                measure_from_json(&v)
            }
        }
    }

    fn config_json(&self) -> serde_json::Value {
        serde_json::json!({
            "catalog": self.catalog,
            "input": self.input.as_ref().map(|p| p.display().to_string()),
            "params": self.param_record().map(|r| r.entries().to_vec()).unwrap_or_default(),
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Grid FSD check: Im C'(w) <= slack over a lower-half-plane grid.
    #[arg(long)]
    pub fsd: bool,
    /// Grid FID check: Im phi(z) <= slack over an upper-half-plane grid.
    #[arg(long)]
    pub fid: bool,
    /// Exact Hankel FSD criterion on {n kappa_n} (needs moments).
    #[arg(long)]
    pub fsd_cumulant: bool,
    /// Exact Hankel FID criterion on {kappa_n} (needs moments).
    #[arg(long)]
    pub fid_cumulant: bool,
    /// Levy-measure monotonicity check (needs a characteristic triplet).
    #[arg(long)]
    pub fsd_levy: bool,
    /// Kerov-transform check for the AWK family (uses --c).
    #[arg(long)]
    pub kerov: bool,

    /// Hankel order for the cumulant criteria.
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Grid override: rmin,rmax,per_decade,angles.
    #[arg(long)]
    pub grid: Option<String>,
    /// Slack override on imaginary parts (within [1e-14, 1e-2]).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Additionally dump per-point grid margins as CSV to this path
    /// (columns: re, im, margin), for external plotting.
    #[arg(long)]
    pub margins_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CumulantsArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Highest cumulant order to report.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Real grid as start:end:step.
    #[arg(long, allow_hyphen_values = true)]
    pub points: String,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// One of: cauchy, f, finv, phi, cumulant, cprime.
    #[arg(long)]
    pub op: String,
    /// Complex evaluation point, e.g. "2i", "-1i", "1.1-0.1i".
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

/// Runs a parsed command; the returned integer is the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Cumulants(args) => cmd_cumulants(args),
        Command::Density(args) => cmd_density(args),
        Command::Transform(args) => cmd_transform(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

fn parse_grid(spec: &str, half: Half) -> Result<HalfPlaneGrid> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::Usage(
            "--grid expects rmin,rmax,per_decade,angles".into(),
        ));
    }
    let r_min: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Usage("bad rmin".into()))?;
    let r_max: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Usage("bad rmax".into()))?;
    let per_decade: usize = parts[2]
        .parse()
        .map_err(|_| Error::Usage("bad per_decade".into()))?;
    let angles: usize = parts[3]
        .parse()
        .map_err(|_| Error::Usage("bad angles".into()))?;
    if !(r_min > 0.0 && r_max > r_min && per_decade >= 1 && angles >= 2) {
        return Err(Error::Usage("grid parameters out of range".into()));
    }
    Ok(HalfPlaneGrid {
        half,
        r_min,
        r_max,
        per_decade,
        angles,
        theta_min: 1e-3,
    })
}

fn check_options(tol: Option<f64>) -> Result<CheckOptions> {
    let mut opts = CheckOptions::default();
    if let Some(t) = tol {
        if !(1e-14..=1e-2).contains(&t) {
            return Err(Error::Usage(format!(
                "--tol must lie in [1e-14, 1e-2], got {t}"
            )));
        }
        opts.slack = t;
    }
    Ok(opts)
}

fn write_output(output: &OutputArgs, content: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{content}") {
                // a closed pipe (e.g. piping into `head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(Error::Usage(format!("cannot write to stdout: {e}"))),
                Ok(()) => Ok(()),
            }
        }
    }
}

fn fmt_f(x: f64) -> String {
    format!("{:.16e}", x)
}

fn exit_code_for(verdicts: &[Verdict]) -> i32 {
    if verdicts.contains(&Verdict::Fail) {
        1
    } else if verdicts.contains(&Verdict::Inconclusive) {
        2
    } else {
        0
    }
}

fn cmd_check(args: &CheckArgs) -> Result<i32> {
    let measure = args.measure.resolve()?;
    let opts = check_options(args.tol)?;
    if !(args.fsd || args.fid || args.fsd_cumulant || args.fid_cumulant || args.fsd_levy || args.kerov)
    {
        return Err(Error::Usage(
            "select at least one of --fsd, --fid, --fsd-cumulant, --fid-cumulant, --fsd-levy, --kerov"
                .into(),
        ));
    }

    let mut reports = Vec::new();
    let mut verdicts = Vec::new();
    let mut hankel_json = Vec::new();

    if args.fsd {
        let grid = match &args.grid {
            Some(g) => parse_grid(g, Half::Lower)?,
            None => HalfPlaneGrid::lower_default(),
        };
        let rep = fsd_grid_check(&measure, &grid, &opts);
        if let Some(path) = &args.margins_csv {
            dump_margins(path, &grid, |w| {
                crate::transforms::free_cumulant_transform_derivative_eval(
                    &measure,
                    w,
                    &opts.transform,
                )
                .map(|tv| tv.value)
            })?;
        }
        verdicts.push(rep.verdict);
        reports.push(rep);
    }
    if args.fid {
        let grid = match &args.grid {
            Some(g) => parse_grid(g, Half::Upper)?,
            None => HalfPlaneGrid::upper_default(),
        };
        let rep = fid_grid_check(&measure, &grid, &opts);
        if let Some(path) = &args.margins_csv {
            if !args.fsd {
                dump_margins(path, &grid, |z| {
                    crate::transforms::voiculescu_eval(&measure, z, &opts.transform)
                        .map(|tv| tv.value)
                })?;
            }
        }
        verdicts.push(rep.verdict);
        reports.push(rep);
    }
    if args.fsd_cumulant || args.fid_cumulant {
        let m = measure
            .moments()
            .ok_or_else(|| Error::Usage(format!("`{}` carries no moments", measure.name())))?;
        if args.fsd_cumulant {
            let (rep, hank) = fsd_cumulant_criterion(m, args.order)?;
            verdicts.push(rep.verdict);
            reports.push(rep);
            hankel_json.push(hank.to_json());
        }
        if args.fid_cumulant {
            let (rep, hank) = fid_cumulant_criterion(m, args.order)?;
            verdicts.push(rep.verdict);
            reports.push(rep);
            hankel_json.push(hank.to_json());
        }
    }
    if args.fsd_levy {
        let t = measure.triplet().ok_or_else(|| {
            Error::Usage(format!(
                "`{}` carries no free characteristic triplet",
                measure.name()
            ))
        })?;
        let rep = fsd_monotonicity_check(t.levy_measure());
        verdicts.push(rep.verdict);
        reports.push(rep);
    }
    if args.kerov {
        let c = args
            .measure
            .c
            .or_else(|| measure.awk_map().map(|m| m.c))
            .ok_or_else(|| Error::Usage("--kerov needs --c (or an AWK measure)".into()))?;
        let grid = match &args.grid {
            Some(g) => parse_grid(g, Half::Upper)?,
            None => HalfPlaneGrid {
                r_min: 1e-2,
                r_max: 1e2,
                per_decade: 10,
                angles: 24,
                ..HalfPlaneGrid::upper_default()
            },
        };
        let rep = kerov_check(c, &grid, &opts)?;
        verdicts.push(rep.verdict);
        reports.push(rep);
    }

    let config = serde_json::json!({
        "command": "check",
        "measure": args.measure.config_json(),
        "flags": {
            "fsd": args.fsd, "fid": args.fid,
            "fsd_cumulant": args.fsd_cumulant, "fid_cumulant": args.fid_cumulant,
            "fsd_levy": args.fsd_levy, "kerov": args.kerov,
            "order": args.order, "grid": args.grid, "tol": args.tol,
        },
        "slack": opts.slack,
    });
    let body = serde_json::json!({
        "measure": crate::measures::measure_to_json(&measure),
        "checks": reports,
        "hankel": hankel_json,
    });
    let doc = crate::report::report_envelope(&config, body);
    match args.output.format {
        Format::Json => write_output(&args.output, &to_json_string(&doc))?,
        Format::Csv => {
            // per-check summary rows
            let mut csv = String::from("check,verdict,margin,witness_re,witness_im,failures\n");
            for r in &reports {
                let (wre, wim) = r
                    .witness
                    .as_ref()
                    .map(|w| (fmt_f(w.location.re), fmt_f(w.location.im)))
                    .unwrap_or_default();
                csv.push_str(&format!(
                    "{},{:?},{},{},{},{}\n",
                    r.check,
                    r.verdict,
                    fmt_f(r.margin),
                    wre,
                    wim,
                    r.evaluation_failures
                ));
            }
            write_output(&args.output, &csv)?;
        }
    }
    Ok(exit_code_for(&verdicts))
}

fn dump_margins<F>(path: &std::path::Path, grid: &HalfPlaneGrid, eval: F) -> Result<()>
where
    F: Fn(num_complex::Complex64) -> Result<num_complex::Complex64> + Sync,
{
    let rows = crate::checkers::margin_rows(&grid.points(), eval);
    let mut csv = String::from("re,im,margin\n");
    for (p, m) in rows {
        match m {
            Some(m) => csv.push_str(&format!("{},{},{}\n", fmt_f(p.re), fmt_f(p.im), fmt_f(m))),
            None => csv.push_str(&format!("{},{},\n", fmt_f(p.re), fmt_f(p.im))),
        }
    }
    std::fs::write(path, csv)
        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_cumulants(args: &CumulantsArgs) -> Result<i32> {
    let measure = args.measure.resolve()?;
    let m = measure
        .moments()
        .ok_or_else(|| Error::Usage(format!("`{}` carries no moments", measure.name())))?;
    if m.order() < args.order {
        return Err(Error::Usage(format!(
            "measure stores moments to order {}, requested {}",
            m.order(),
            args.order
        )));
    }
    let trunc = m.truncate(args.order);
    let kappa = free_cumulants_from_moments(&trunc)?;
    let n_kappa: Vec<String> = kappa
        .entries()
        .iter()
        .enumerate()
        .map(|(i, k)| rat_display(&(k * rat_i64(i as i64 + 1))))
        .collect();

    let hankel_order = args.order / 2;
    let mut verdicts = Vec::new();
    let mut checks = Vec::new();
    let mut hankels = Vec::new();
    if hankel_order >= 1 {
        let (rep, hank) = fsd_cumulant_criterion(&trunc, hankel_order)?;
        verdicts.push(rep.verdict);
        checks.push(rep);
        hankels.push(hank.to_json());
        let (rep, hank) = fid_cumulant_criterion(&trunc, hankel_order)?;
        verdicts.push(rep.verdict);
        checks.push(rep);
        hankels.push(hank.to_json());
    }

    let config = serde_json::json!({
        "command": "cumulants",
        "measure": args.measure.config_json(),
        "order": args.order,
    });
    let body = serde_json::json!({
        "moments": trunc.entries().iter().map(rat_display).collect::<Vec<_>>(),
        "kappa": kappa.entries().iter().map(rat_display).collect::<Vec<_>>(),
        "n_kappa": n_kappa,
        "hankel_checks": checks,
        "hankel": hankels,
    });
    let doc = crate::report::report_envelope(&config, body);
    match args.output.format {
        Format::Json => write_output(&args.output, &to_json_string(&doc))?,
        Format::Csv => {
            let mut csv = String::from("n,moment,kappa,n_kappa\n");
            for i in 1..=args.order {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    i,
                    rat_display(trunc.entry(i)),
                    rat_display(kappa.entry(i)),
                    rat_display(&(kappa.entry(i) * rat_i64(i as i64)))
                ));
            }
            write_output(&args.output, &csv)?;
        }
    }
    Ok(exit_code_for(&verdicts))
}

fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Usage("--points expects start:end:step".into()));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Usage("bad start".into()))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Usage("bad end".into()))?;
    let h: f64 = parts[2]
        .parse()
        .map_err(|_| Error::Usage("bad step".into()))?;
    if !(h > 0.0 && b >= a) {
        return Err(Error::Usage("need end >= start and step > 0".into()));
    }
    let n = ((b - a) / h).round() as usize;
    Ok((0..=n).map(|i| a + h * i as f64).collect())
}

fn cmd_density(args: &DensityArgs) -> Result<i32> {
    let measure = args.measure.resolve()?;
    let points = parse_points(&args.points)?;
    let topts = TransformOptions::default();

    let mut rows: Vec<(f64, f64, f64, &'static str)> = Vec::new();
    for &t in &points {
        if let Some(d) = measure.density() {
            if d.has_density() {
                rows.push((t, d.density_at(t), 1e-12, "density"));
                continue;
            }
        }
        if let Some(map) = measure.awk_map() {
            // affine image of mu_c: kappa((t - shift)/scale)/scale, with the
            // Riccati-backed evaluation that works down to the axis
            let v = crate::awk::awk_density(map.c, (t - map.shift) / map.scale)? / map.scale;
            rows.push((t, v, 1e-9, "awk-density"));
            continue;
        }
        let (v, e) = stieltjes_density(&measure, t, &topts)?;
        rows.push((t, v, e, "stieltjes-inversion"));
    }

    let config = serde_json::json!({
        "command": "density",
        "measure": args.measure.config_json(),
        "points": args.points,
    });
    match args.output.format {
        Format::Csv => {
            let mut csv = String::from("t,density,est_error,method\n");
            for (t, v, e, m) in &rows {
                csv.push_str(&format!("{},{},{},{m}\n", fmt_f(*t), fmt_f(*v), fmt_f(*e)));
            }
            write_output(&args.output, &csv)?;
        }
        Format::Json => {
            let body = serde_json::json!({
                "rows": rows
                    .iter()
                    .map(|(t, v, e, m)| serde_json::json!({"t": t, "density": v, "est_error": e, "method": m}))
                    .collect::<Vec<_>>(),
            });
            let doc = crate::report::report_envelope(&config, body);
            write_output(&args.output, &to_json_string(&doc))?;
        }
    }
    Ok(0)
}

/// Parses complex literals like `3`, `2i`, `-1i`, `1.1-0.1i`, `0.5+2i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim().replace(' ', "");
    if s.is_empty() {
        return Err(Error::Usage("empty complex literal".into()));
    }
    let bad = || Error::Usage(format!("cannot parse complex literal `{s}`"));
    if let Some(body) = s.strip_suffix('i') {
        // find the split between real and imaginary parts: the last +/- not
        // at position 0 and not part of an exponent
        let chars: Vec<char> = body.chars().collect();
        let mut split = None;
        for i in (1..chars.len()).rev() {
            if (chars[i] == '+' || chars[i] == '-')
                && chars[i - 1] != 'e'
                && chars[i - 1] != 'E'
            {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i].parse().map_err(|_| bad())?;
                let imag_str = &body[i..];
                let im: f64 = if imag_str == "+" {
                    1.0
                } else if imag_str == "-" {
                    -1.0
                } else {
                    imag_str.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

fn cmd_transform(args: &TransformArgs) -> Result<i32> {
    let measure = args.measure.resolve()?;
    let z = parse_complex(&args.point)?;
    let topts = TransformOptions::default();

    let tv: TransformValue = match args.op.as_str() {
        "cauchy" => cauchy_eval(&measure, z, &topts)?,
        "f" => reciprocal_cauchy_eval(&measure, z, &topts)?,
        "finv" => {
            let v = invert_reciprocal_cauchy(&measure, z, &topts)?;
            TransformValue {
                value: v,
                est_error: topts.newton_tol * (1.0 + v.norm()),
                method: EvalMethod::NewtonInversion,
            }
        }
        "phi" => voiculescu_eval(&measure, z, &topts)?,
        "cumulant" | "c" => free_cumulant_transform_eval(&measure, z, &topts)?,
        "cprime" => free_cumulant_transform_derivative_eval(&measure, z, &topts)?,
        other => {
            return Err(Error::Usage(format!(
                "unknown op `{other}` (expected cauchy|f|finv|phi|cumulant|cprime)"
            )))
        }
    };

    let config = serde_json::json!({
        "command": "transform",
        "measure": args.measure.config_json(),
        "op": args.op,
        "point": args.point,
    });
    match args.output.format {
        Format::Csv => {
            let mut csv = String::from("point_re,point_im,value_re,value_im,est_error,method\n");
            csv.push_str(&format!(
                "{},{},{},{},{},{:?}\n",
                fmt_f(z.re),
                fmt_f(z.im),
                fmt_f(tv.value.re),
                fmt_f(tv.value.im),
                fmt_f(tv.est_error),
                tv.method
            ));
            write_output(&args.output, &csv)?;
        }
        Format::Json => {
            let body = serde_json::json!({
                "point": {"re": z.re, "im": z.im},
                "value": {"re": tv.value.re, "im": tv.value.im},
                "est_error": tv.est_error,
                "method": tv.method,
            });
            let doc = crate::report::report_envelope(&config, body);
            write_output(&args.output, &to_json_string(&doc))?;
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-1i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1.1-0.1i").unwrap(), Complex64::new(1.1, -0.1));
        assert_eq!(parse_complex("0.5+2i").unwrap(), Complex64::new(0.5, 2.0));
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-2e-3i").unwrap(), Complex64::new(0.0, -2e-3));
        assert_eq!(parse_complex("1e2+1e-2i").unwrap(), Complex64::new(100.0, 0.01));
        assert!(parse_complex("xyz").is_err());
    }

    #[test]
    fn point_grids() {
        let p = parse_points("-1:1:0.5").unwrap();
        assert_eq!(p, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(parse_points("1:0:0.5").is_err());
    }

    #[test]
    fn tol_bounds_enforced() {
        assert!(check_options(Some(1e-3)).is_ok());
        assert!(check_options(Some(0.5)).is_err());
        assert!(check_options(Some(1e-15)).is_err());
    }
}
