//! Command-line front end. Angles are degrees here and radians everywhere else.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::approx::{project, sweep, ReconstructionReport};
use crate::error::{Error, Result};
use crate::io::{self, CoeffKind};
use crate::kernel::{assemble_polarcap, assemble_quadrature, KernelMatrix};
use crate::region::Region;
use crate::spectral::{merge_fixed_order, shannon, solve, solve_polarcap_blocks, ShannonReport, SlepianBasis};
use crate::vsh::{synth, CoeffVector, GridSpec, Part};

#[derive(Debug, Parser)]
#[command(name = "vslepian", version, about = "Vector Slepian bases on the sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
struct RegionArgs {
    /// Polar cap of this colatitude radius, degrees
    #[arg(long, value_name = "DEG", allow_negative_numbers = true)]
    cap: Option<f64>,
    /// Polygon file: blocks of "lon lat" lines separated by blank lines
    #[arg(long, value_name = "FILE")]
    polygon: Option<PathBuf>,
    /// Mask file: "MASK nlat nlon" then 0/1 rows from north to south
    #[arg(long, value_name = "FILE")]
    mask: Option<PathBuf>,
}

impl RegionArgs {
    fn load(&self) -> Result<Region> {
        if let Some(deg) = self.cap {
            Region::polar_cap_deg(deg)
        } else if let Some(p) = &self.polygon {
            Region::polygons(io::read_polygons(&io::read_file(p)?)?)
        } else if let Some(p) = &self.mask {
            Region::mask(io::read_mask(&io::read_file(p)?)?)
        } else {
            Err(Error::domain("give a region: --cap, --polygon or --mask"))
        }
    }
}

#[derive(Debug, Args)]
struct Method {
    /// Use the analytic per-order blocks (polar caps only; default for caps)
    #[arg(long, conflicts_with = "quadrature")]
    cap_analytic: bool,
    /// Assemble by quadrature even for polar caps
    #[arg(long)]
    quadrature: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Assemble a localization kernel and report its Shannon numbers
    Kernel {
        #[command(flatten)]
        region: RegionArgs,
        /// Bandlimit
        #[arg(long = "L")]
        l: usize,
        #[command(flatten)]
        method: Method,
        /// radial, tangential or full
        #[arg(long, default_value = "full")]
        part: String,
        /// Output file (dense kernel) or directory (per-order blocks)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the concentration problem; writes eigenvalues and basis
    Solve {
        #[command(flatten)]
        region: Option<RegionArgs>,
        /// Kernel file written by `kernel`
        #[arg(long, conflicts_with_all = ["cap", "polygon", "mask"])]
        kernel: Option<PathBuf>,
        #[arg(long = "L")]
        l: Option<usize>,
        #[command(flatten)]
        method: Method,
        #[arg(long, default_value = "tangential")]
        part: String,
        /// Output directory for eigenvalues.txt and basis.txt
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize a basis column or a coefficient file on a lon/lat grid
    Synth {
        #[arg(long, requires = "alpha", conflicts_with = "coeffs")]
        basis: Option<PathBuf>,
        /// Column number, starting at 1
        #[arg(long)]
        alpha: Option<usize>,
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Grid spacing, degrees
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Project a field onto a regional basis, truncate and report error and leakage
    Reconstruct {
        #[arg(long)]
        coeffs: PathBuf,
        #[command(flatten)]
        region: RegionArgs,
        /// Bandlimit (defaults to that of the coefficient file)
        #[arg(long = "L")]
        l: Option<usize>,
        /// Truncation J
        #[arg(long, conflicts_with = "times_shannon")]
        j: Option<usize>,
        /// Truncation as a multiple of the rounded Shannon number
        #[arg(long)]
        times_shannon: Option<f64>,
        /// Also report every multiple of this step up to the full dimension
        #[arg(long)]
        sweep: Option<usize>,
        /// Output directory for the report and field grids
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shannon numbers predicted from an area fraction or a region
    Shannon {
        #[command(flatten)]
        region: Option<RegionArgs>,
        /// Area as a fraction of the sphere
        #[arg(long, conflicts_with_all = ["cap", "polygon", "mask"])]
        fraction: Option<f64>,
        #[arg(long = "L")]
        l: usize,
    },
}

/// Runs the CLI; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn parse_part(s: &str) -> Result<Part> {
    s.parse()
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Kernel {
            region,
            l,
            method,
            part,
            out: path,
        } => cmd_kernel(&region.load()?, l, &method, parse_part(&part)?, path.as_deref(), out),
        Command::Solve {
            region,
            kernel,
            l,
            method,
            part,
            out: path,
        } => {
            let basis = if let Some(k) = kernel {
                solve(&io::read_kernel(&io::read_file(&k)?)?)?
            } else {
                let region = region.ok_or_else(|| Error::domain("give a region or --kernel"))?.load()?;
                let l = l.ok_or_else(|| Error::domain("--L is required with a region"))?;
                regional_basis(&region, l, parse_part(&part)?, &method)?.0
            };
            cmd_solve(&basis, path.as_deref(), out)
        }
        Command::Synth {
            basis,
            alpha,
            coeffs,
            step,
            out: path,
        } => {
            let c = if let Some(b) = basis {
                let basis = io::read_basis(&io::read_file(&b)?)?;
                let a = alpha.unwrap_or(0);
                if a == 0 || a > basis.len() {
                    return Err(Error::IndexOutOfRange {
                        index: a,
                        len: basis.len(),
                    });
                }
                basis.coeffs(a - 1)?
            } else if let Some(c) = coeffs {
                io::read_coeffs(&io::read_file(&c)?)?.0
            } else {
                return Err(Error::domain("give --basis with --alpha, or --coeffs"));
            };
            let grid = synth(&c, &GridSpec::equiangular(step)?)?;
            io::write_file(&path, &io::write_grid(&grid))?;
            writeln!(out, "wrote {} x {} grid to {}", grid.thetas.len(), grid.phis.len(), path.display())?;
            Ok(())
        }
        Command::Reconstruct {
            coeffs,
            region,
            l,
            j,
            times_shannon,
            sweep,
            out: path,
        } => {
            let (u, _) = io::read_coeffs(&io::read_file(&coeffs)?)?;
            let u = match l {
                Some(l) => u.with_bandlimit(l),
                None => u,
            };
            cmd_reconstruct(&u, &region.load()?, j, times_shannon, sweep, path.as_deref(), out)
        }
        Command::Shannon { region, fraction, l } => {
            let area = match (fraction, region) {
                (Some(f), _) => {
                    if !(f > 0.0 && f <= 1.0) {
                        return Err(Error::domain(format!("fraction {f} not in (0, 1]")));
                    }
                    f * 4.0 * std::f64::consts::PI
                }
                (None, Some(r)) => r.load()?.area()?,
                (None, None) => return Err(Error::domain("give --fraction or a region")),
            };
            print_shannon(out, "predicted", &ShannonReport::predicted(area, l))
        }
    }
}

fn print_shannon(out: &mut dyn Write, label: &str, s: &ShannonReport) -> Result<()> {
    writeln!(out, "{label} N {:.6} rounded {}", s.total, s.rounded_total())?;
    writeln!(out, "{label} N_radial {:.6} rounded {}", s.radial, s.rounded_radial())?;
    writeln!(out, "{label} N_tangential {:.6} rounded {}", s.tangential, s.rounded_tangential())?;
    Ok(())
}

fn use_analytic(region: &Region, method: &Method) -> Result<Option<f64>> {
    match region {
        Region::PolarCap { theta } if !method.quadrature => Ok(Some(*theta)),
        _ if method.cap_analytic => Err(Error::domain("--cap-analytic needs a polar cap")),
        _ => Ok(None),
    }
}

fn cmd_kernel(region: &Region, l: usize, method: &Method, part: Part, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let area = region.area()?;
    writeln!(out, "region {} area {:.12}", region.fingerprint(), area)?;
    writeln!(out, "L {l}")?;
    let report = if let Some(theta) = use_analytic(region, method)? {
        let cap = assemble_polarcap(theta, l)?;
        if let Some(dir) = path {
            std::fs::create_dir_all(dir)?;
            for block in cap.blocks() {
                if block.kind.part() == part || part == Part::Full {
                    let name = block.kind.name().replace(':', "_");
                    io::write_file(&dir.join(format!("{name}.kernel")), &io::write_kernel(&block))?;
                }
            }
        }
        ShannonReport::from_polarcap(&cap)
    } else {
        let k = assemble_quadrature(region, l, part)?;
        if let Some(p) = path {
            io::write_file(p, &io::write_kernel(&k))?;
        }
        writeln!(out, "trace {:.12}", k.trace())?;
        shannon(&k)
    };
    print_shannon(out, "kernel", &report)?;
    print_shannon(out, "predicted", &ShannonReport::predicted(area, l))
}

/// Basis and dense kernel for a region: analytic blocks for caps, quadrature otherwise.
fn regional_basis(region: &Region, l: usize, part: Part, method: &Method) -> Result<(SlepianBasis, KernelMatrix)> {
    if let Some(theta) = use_analytic(region, method)? {
        let cap = assemble_polarcap(theta, l)?;
        let basis = merge_fixed_order(&solve_polarcap_blocks(&cap, part)?)?;
        Ok((basis, cap.dense(part)))
    } else {
        let k = assemble_quadrature(region, l, part)?;
        Ok((solve(&k)?, k))
    }
}

fn cmd_solve(basis: &SlepianBasis, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let n: f64 = basis.lambdas.iter().sum();
    let half = basis.lambdas.iter().filter(|&&l| l >= 0.5).count();
    writeln!(out, "kind {} L {} count {}", basis.kind().as_str(), basis.l_max, basis.len())?;
    writeln!(out, "sum_lambda {n:.12} rounded {}", n.round() as i64)?;
    writeln!(out, "lambda_ge_half {half}")?;
    if let (Some(first), Some(last)) = (basis.lambdas.first(), basis.lambdas.last()) {
        writeln!(out, "lambda_max {first:.16e} lambda_min {last:.16e}")?;
    }
    if let Some(dir) = path {
        std::fs::create_dir_all(dir)?;
        io::write_file(&dir.join("eigenvalues.txt"), &io::write_eigenvalues(basis))?;
        io::write_file(&dir.join("basis.txt"), &io::write_basis(basis)?)?;
    }
    Ok(())
}

fn cmd_reconstruct(
    u: &CoeffVector,
    region: &Region,
    j: Option<usize>,
    times_shannon: Option<f64>,
    step: Option<usize>,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let part = u.natural_part();
    let l = u.l_max();
    let (basis, kernel) = regional_basis(region, l, part, &Method {
        cap_analytic: false,
        quadrature: false,
    })?;
    let n = ShannonReport::predicted(region.area()?, l);
    let n_part = match part {
        Part::Radial => n.rounded_radial(),
        Part::Tangential => n.rounded_tangential(),
        Part::Full => n.rounded_total(),
    };
    let j = match j {
        Some(j) => j,
        None => ((times_shannon.unwrap_or(1.0) * n_part as f64).round() as usize).max(1),
    };
    if j == 0 || j > basis.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: basis.len(),
        });
    }
    let mut js: Vec<usize> = match step {
        Some(0) => return Err(Error::domain("--sweep step must be positive")),
        Some(s) => (1..=basis.len() / s).map(|k| k * s).collect(),
        None => Vec::new(),
    };
    js.push(j);
    js.sort_unstable();
    js.dedup();
    let reports = sweep(u, &basis, &kernel, &js)?;
    writeln!(out, "kind {} L {} dim {} shannon {n_part} J {j}", part.as_str(), l, basis.len())?;
    let table = report_table(&reports);
    out.write_all(table.as_bytes())?;
    if let Some(dir) = path {
        std::fs::create_dir_all(dir)?;
        io::write_file(&dir.join("report.txt"), &table)?;
        let coeffs = project(u, &basis)?;
        let mut v = CoeffVector::zeros(l);
        for (a, c) in coeffs.iter().enumerate().take(j) {
            v.axpy(*c, &basis.coeffs(a)?)?;
        }
        let kind = if v.has_tangential() || u.has_tangential() {
            CoeffKind::FullUvw
        } else {
            CoeffKind::ScalarU
        };
        io::write_file(&dir.join("reconstruction.coeff"), &io::write_coeffs(&v, kind)?)?;
        let grid = GridSpec::equiangular(1.0)?;
        io::write_file(&dir.join("input.grid"), &io::write_grid(&synth(u, &grid)?))?;
        io::write_file(&dir.join("reconstruction.grid"), &io::write_grid(&synth(&v, &grid)?))?;
    }
    Ok(())
}

fn report_table(reports: &[ReconstructionReport]) -> String {
    let mut s = String::from("# J epsilon b\n");
    for r in reports {
        s.push_str(&format!("{} {:.16e} {:.16e}\n", r.j, r.epsilon, r.bias));
    }
    s
}
