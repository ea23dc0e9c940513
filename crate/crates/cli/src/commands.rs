use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use bootperc::analytic::{self, QuadratureSettings};
use bootperc::dynamics;
use bootperc::grid::{load_json, GridFile};
use bootperc::montecarlo::{self, EventKind, EventSpec, SweepConfig};
use bootperc::span;
use bootperc::structures::{self, Rectangle, StructureSpec};
use bootperc::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::format::{decimals_for_tol, significant};
use crate::Command;

const SIG: usize = 7;

pub fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Domain(_) | Error::Parse(_) | Error::GridPoint { .. } => 1,
        Error::Numeric(_) => 2,
        Error::Io { .. } => 3,
    }
}

fn announce(cmd: &Command, extra: Value) {
    let mut config = serde_json::to_value(cmd).expect("commands serialize");
    if let (Value::Object(map), Value::Object(more)) = (&mut config, extra) {
        map.extend(more);
    }
    eprintln!("resolved config: {config}");
}

fn print_json(v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("results serialize");
    writeln!(io::stdout().lock(), "{text}").map_err(|e| Error::io("<stdout>", e))
}

fn print_line(line: &str) -> Result<()> {
    writeln!(io::stdout().lock(), "{line}").map_err(|e| Error::io("<stdout>", e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn load_event(event: &str, structure: &Path) -> Result<EventSpec> {
    let structure: StructureSpec = load_json(structure, "structure file")?;
    Ok(EventSpec { kind: EventKind::parse(event)?, structure })
}

#[derive(Serialize)]
struct WitnessReport {
    #[serde(rename = "L")]
    l: usize,
    rectangle: Option<Rectangle>,
    component: Option<Vec<structures::Coord>>,
    component_diameter: Option<usize>,
}

pub fn run(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Beta { k, u } => {
            announce(cmd, json!({}));
            print_line(&significant(analytic::beta(*k, *u)?, SIG))
        }
        Command::G { k, z } => {
            announce(cmd, json!({}));
            print_line(&significant(analytic::g(*k, *z)?, SIG))
        }
        Command::Lambda { d, r, tol } => {
            let settings = QuadratureSettings::with_tol(*tol);
            announce(cmd, json!({ "max_depth": settings.max_depth }));
            print_line(&significant(analytic::lambda(*d, *r, &settings)?, SIG))
        }
        Command::LambdaTable { dmax, tol, out } => {
            let settings = QuadratureSettings::with_tol(*tol);
            announce(cmd, json!({ "max_depth": settings.max_depth }));
            let table = analytic::lambda_table(*dmax, &settings)?;
            let decimals = decimals_for_tol(*tol);
            let mut text = String::from("d,r,lambda,absTol\n");
            for e in &table {
                text.push_str(&format!("{},{},{:.*},{:e}\n", e.d, e.r, decimals, e.lambda, tol));
            }
            match out {
                Some(path) => {
                    let mut f = create(path)?;
                    f.write_all(text.as_bytes())
                        .and_then(|_| f.flush())
                        .map_err(|e| Error::io(path, e))
                }
                None => io::stdout()
                    .lock()
                    .write_all(text.as_bytes())
                    .map_err(|e| Error::io("<stdout>", e)),
            }
        }
        Command::Lgap { ell, m, u, exact, trials, seed } => {
            announce(cmd, json!({}));
            if *exact {
                return print_line(&significant(analytic::l_exact(*ell, *m, *u)?, SIG));
            }
            let m = u32::try_from(*m)
                .map_err(|_| Error::Domain(format!("simulation needs m >= 0, got {m}")))?;
            print_json(&montecarlo::estimate_lgap(*ell, m, *u, *trials, *seed)?)
        }
        Command::Closure { input } => {
            announce(cmd, json!({}));
            let (s, a) = GridFile::load(input)?.resolve()?;
            print_json(&GridFile::from_cells(&s, &dynamics::closure(&s, &a)))
        }
        Command::Span { input, direct } => {
            announce(cmd, json!({}));
            let (s, a) = GridFile::load(input)?.resolve()?;
            let res = if *direct {
                span::span_direct(&s, &a)
            } else {
                span::span_main_algorithm(&s, &a)
            };
            print_json(&res)
        }
        Command::Witness { input, l } => {
            announce(cmd, json!({}));
            let (s, a) = GridFile::load(input)?.resolve()?;
            let rectangle = span::find_spanned_rectangle(&s, &a, *l)?;
            let component = span::find_spanned_component(&s, &a, *l)?;
            print_json(&WitnessReport {
                l: *l,
                rectangle,
                component_diameter: component.as_ref().map(structures::diameter),
                component: component.map(|c| c.coords().collect()),
            })
        }
        Command::Estimate { event, structure, p, trials, seed } => {
            let spec = load_event(event, structure)?;
            announce(cmd, json!({ "resolved_event": spec }));
            print_json(&montecarlo::estimate_event_prob(&spec, *p, *trials, *seed)?)
        }
        Command::Threshold { alpha, structure, event, trials, seed, ptol } => {
            let spec = load_event(event, structure)?;
            announce(cmd, json!({ "resolved_event": spec }));
            print_json(&montecarlo::estimate_p_alpha(&spec, *alpha, *trials, *seed, *ptol)?)
        }
        Command::Sweep { config, out } => {
            let cfg: SweepConfig = load_json(config, "sweep config")?;
            announce(cmd, json!({ "sweep": cfg }));
            let target = out.clone().or_else(|| cfg.output.clone());
            match target {
                Some(path) => {
                    let rows = montecarlo::run_sweep(&cfg, create(&path)?)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                    Ok(())
                }
                None => montecarlo::run_sweep(&cfg, io::stdout().lock()).map(|_| ()),
            }
        }
    }
}
