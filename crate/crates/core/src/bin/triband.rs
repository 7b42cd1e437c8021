use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use triband::parse::{parse_complex, parse_complex_list, parse_config, parse_real_list};
use triband::region::{emit, scan_region, Format, Window};
use triband::verify::{empirical_norm, run_suite, to_json_lines, SuiteConfig};
use triband::{
    fine_classify, norm_bounds_lp, Error, NormBounds, OperatorParams, Preset, SpaceIndex,
    DEFAULT_TOL,
};

/// Spectral classification of B(r1,r2; s1,s2; t1,t2) on l_p.
#[derive(Parser, Debug)]
#[command(name = "triband", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Classify a single lambda, printed as JSON.
    Classify,
    /// Classify every cell of a window and write csv, json or pgm.
    Region,
    /// Run the finite-section oracles; exits 2 on any disagreement.
    Verify,
    /// Norm bracket and empirical estimate.
    Norm,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// r1,r2,s1,s2,t1,t2 as complex literals, e.g. 1,i,2,1,-i,1
    #[arg(long, global = true, allow_hyphen_values = true)]
    params: Option<String>,
    /// paper-ex1, paper-ex2, delta, brs(r,s), brst(r,s,t), zweier(s)
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Exponent of l_p (default 2)
    #[arg(long, global = true)]
    p: Option<String>,
    /// Half-width of the boundary band around ratio 1 (default 1e-9)
    #[arg(long, global = true)]
    tol: Option<String>,
    /// re_min,re_max,im_min,im_max (default -3,3,-3,3)
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// nx,ny (default 101,101 for region, 41,41 for verify)
    #[arg(long, global = true)]
    res: Option<String>,
    /// Seed for random trials (default 0)
    #[arg(long, global = true)]
    seed: Option<String>,
    /// csv, json or pgm (default csv)
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,
    /// Point to classify
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// key=value file with the same keys as the long flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Disagreement(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Flag values after merging the config file underneath the command line.
struct Settings(BTreeMap<String, String>);

impl Settings {
    fn new(opts: &Opts) -> Result<Self, Failure> {
        let mut map = match &opts.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Failure::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        const KEYS: [&str; 10] = [
            "params", "preset", "p", "tol", "window", "res", "seed", "format", "out", "lambda",
        ];
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Failure::Usage(format!("unknown config key '{k}'")));
        }
        let flags = [
            ("params", &opts.params),
            ("preset", &opts.preset),
            ("p", &opts.p),
            ("tol", &opts.tol),
            ("window", &opts.window),
            ("res", &opts.res),
            ("seed", &opts.seed),
            ("format", &opts.format),
            ("out", &opts.out),
            ("lambda", &opts.lambda),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        Ok(Settings(map))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn number<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, Failure> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad value for --{key}: '{v}'"))),
        }
    }

    fn params(&self) -> Result<OperatorParams, Failure> {
        match (self.get("params"), self.get("preset")) {
            (Some(_), Some(_)) => Err(Failure::Usage(
                "give either --params or --preset, not both".into(),
            )),
            (None, None) => Err(Failure::Usage(
                "one of --params or --preset is required".into(),
            )),
            (None, Some(name)) => Ok(name.parse::<Preset>()?.params()?),
            (Some(list), None) => {
                let v = parse_complex_list(list)?;
                if v.len() != 6 {
                    return Err(Failure::Usage(format!(
                        "--params needs 6 values, got {}",
                        v.len()
                    )));
                }
                Ok(OperatorParams::new(v[0], v[1], v[2], v[3], v[4], v[5])?)
            }
        }
    }

    fn space(&self) -> Result<SpaceIndex, Failure> {
        Ok(SpaceIndex::new(self.number("p", 2.0)?)?)
    }

    fn window(&self, default_res: (usize, usize)) -> Result<Window, Failure> {
        let bounds = match self.get("window") {
            Some(w) => parse_real_list(w)?,
            None => vec![-3.0, 3.0, -3.0, 3.0],
        };
        if bounds.len() != 4 {
            return Err(Failure::Usage(
                "--window needs re_min,re_max,im_min,im_max".into(),
            ));
        }
        let (nx, ny) = match self.get("res") {
            Some(r) => {
                let v: Vec<&str> = r.split(',').map(str::trim).collect();
                match v.as_slice() {
                    [a, b] => (
                        a.parse()
                            .map_err(|_| Failure::Usage(format!("bad --res '{r}'")))?,
                        b.parse()
                            .map_err(|_| Failure::Usage(format!("bad --res '{r}'")))?,
                    ),
                    _ => return Err(Failure::Usage("--res needs nx,ny".into())),
                }
            }
            None => default_res,
        };
        Ok(Window::new(
            bounds[0], bounds[1], bounds[2], bounds[3], nx, ny,
        )?)
    }

    fn write(&self, bytes: &[u8]) -> Result<(), Failure> {
        match self.get("out") {
            Some(path) => fs::write(path, bytes)?,
            None => io::stdout().lock().write_all(bytes)?,
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct NormReport {
    p: f64,
    #[serde(flatten)]
    bounds: NormBounds,
    empirical: f64,
    n: usize,
    trials: usize,
    seed: u64,
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let s = Settings::new(&cli.opts)?;
    let params = s.params()?;
    let space = s.space()?;
    let tol = s.number("tol", DEFAULT_TOL)?;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Usage(format!(
            "--tol must be a non-negative number, got {tol}"
        )));
    }
    let seed = s.number("seed", 0u64)?;

    match cli.command {
        Command::Classify => {
            let lambda = s
                .get("lambda")
                .ok_or_else(|| Failure::Usage("classify needs --lambda".into()))?;
            let v = fine_classify(&params, space, parse_complex(lambda)?, tol);
            let mut out = serde_json::to_vec(&v).expect("classification serializes");
            out.push(b'\n');
            s.write(&out)
        }
        Command::Region => {
            let format: Format = s.get("format").unwrap_or("csv").parse()?;
            let grid = scan_region(&params, space, s.window((101, 101))?, tol);
            s.write(&emit(&grid, format))
        }
        Command::Verify => {
            let cfg = SuiteConfig {
                window: s.window((41, 41))?,
                seed,
                ..SuiteConfig::for_space(space)
            };
            let report = run_suite(&params, space, &cfg)?;
            s.write(to_json_lines(&report.verdicts).as_bytes())?;
            for c in &report.checks {
                eprintln!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Disagreement(
                    "verification found disagreements".into(),
                ))
            }
        }
        Command::Norm => {
            let (n, trials) = (64, 200);
            let report = NormReport {
                p: space.p,
                bounds: norm_bounds_lp(&params, space),
                empirical: empirical_norm(&params, space, n, trials, seed)?,
                n,
                trials,
                seed,
            };
            let mut out = serde_json::to_vec(&report).expect("report serializes");
            out.push(b'\n');
            s.write(&out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Disagreement(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
