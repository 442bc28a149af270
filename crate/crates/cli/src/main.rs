//! Command-line front end: `cartex decompose | inpaint | metrics`.
//!
//! The binary is a thin shell over the library: flag parsing, optional
//! `key=value` config files (flags override the file, the file overrides
//! defaults), PGM I/O, and the CSV run report. Exit codes: 0 success,
//! 2 argument or input-constraint errors, 3 file/format errors, 4 numeric
//! failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use cartex::decompose::{decompose, SolverConfig};
use cartex::imgio::{psnr, read_image, read_mask, write_image};
use cartex::inpaint::{inpaint, InpaintConfig};
use cartex::report::RunReport;
use cartex::transforms::{write_coeffs, DEFAULT_BLOCK, DEFAULT_LEVELS};
use cartex::{BlockDctDictionary, CombinedOperator, Error, ImageGrid, WaveletDictionary};
use clap::{Args, Parser, Subcommand};

mod config;
use config::ConfigFile;

#[derive(Parser)]
#[command(
    name = "cartex",
    version,
    about = "Two-dictionary sparse image decomposition and inpainting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a fully observed image into texture and cartoon layers.
    Decompose(DecomposeArgs),
    /// Fill in the masked-out pixels of an image.
    Inpaint(InpaintArgs),
    /// Print the PSNR between two images.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct CommonSolverArgs {
    /// Optional key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,

    /// DCT block size for the texture dictionary.
    #[arg(long)]
    block: Option<usize>,

    /// Wavelet resolution levels for the cartoon dictionary.
    #[arg(long)]
    levels: Option<usize>,

    /// Outer continuation stages.
    #[arg(long)]
    outer: Option<usize>,

    /// Inner gradient steps per stage.
    #[arg(long)]
    inner: Option<usize>,

    /// Geometric sigma decay in (0, 1).
    #[arg(long)]
    sigma_decay: Option<f64>,

    /// Crop the inputs down to the nearest compatible size instead of
    /// rejecting indivisible dimensions.
    #[arg(long, default_value_t = false)]
    crop: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input grayscale image (binary PGM).
    #[arg(long)]
    input: PathBuf,

    /// Output path for the texture layer.
    #[arg(long)]
    out_texture: Option<PathBuf>,

    /// Output path for the cartoon layer.
    #[arg(long)]
    out_cartoon: Option<PathBuf>,

    /// Output path for the coefficient dump (texture then cartoon).
    #[arg(long)]
    out_coeffs: Option<PathBuf>,

    /// Output path for the CSV run report.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Gradient step size (sigma^2 units) for both layers.
    #[arg(long)]
    mu: Option<f64>,

    #[command(flatten)]
    common: CommonSolverArgs,
}

#[derive(Args)]
struct InpaintArgs {
    /// Input grayscale image (binary PGM).
    #[arg(long)]
    input: PathBuf,

    /// Mask image: 255 = known pixel, 0 = missing.
    #[arg(long)]
    mask: PathBuf,

    /// Output path for the reconstruction.
    #[arg(long)]
    out: PathBuf,

    /// Initial data-fidelity weight.
    #[arg(long)]
    lambda_max: Option<f64>,

    /// Total-variation weight for the cartoon layer.
    #[arg(long)]
    gamma: Option<f64>,

    /// TV correction step size.
    #[arg(long)]
    mu_tv: Option<f64>,

    /// TV smoothing epsilon.
    #[arg(long)]
    eps_tv: Option<f64>,

    /// Re-impose known pixels on the output.
    #[arg(long)]
    reimpose: Option<bool>,

    /// Ground-truth image; adds PSNR figures to the report.
    #[arg(long)]
    truth: Option<PathBuf>,

    /// Output path for the CSV run report.
    #[arg(long)]
    report: Option<PathBuf>,

    #[command(flatten)]
    common: CommonSolverArgs,
}

#[derive(Args)]
struct MetricsArgs {
    /// First image.
    #[arg(long)]
    a: PathBuf,

    /// Second image.
    #[arg(long)]
    b: PathBuf,

    /// Restrict the comparison to the pixels this mask marks missing.
    #[arg(long)]
    mask: Option<PathBuf>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Dimension(_) | Error::Parameter(_) | Error::Degenerate(_) | Error::Validation(_) => 2,
        Error::Parse { .. } | Error::Unsupported(_) | Error::Io(_) => 3,
        Error::Singular(_) | Error::NonFinite(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Inpaint(args) => cmd_inpaint(args),
        Command::Metrics(args) => cmd_metrics(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Largest size not exceeding `len` that both dictionaries accept.
fn compatible_size(len: usize, block: usize, levels: usize) -> Result<usize, Error> {
    let dyadic = 1usize
        .checked_shl(levels as u32)
        .ok_or_else(|| Error::Parameter(format!("level count {levels} is too large")))?;
    let gcd = {
        let (mut a, mut b) = (block, dyadic);
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    let lcm = block / gcd * dyadic;
    let size = len / lcm * lcm;
    if size == 0 {
        return Err(Error::Dimension(format!(
            "dimension {len} is smaller than one {lcm}-pixel tile (block {block}, 2^{levels})"
        )));
    }
    Ok(size)
}

/// Validate divisibility or crop, depending on `crop`.
fn fit_image(
    img: ImageGrid,
    block: usize,
    levels: usize,
    crop: bool,
) -> Result<ImageGrid, Error> {
    let dyadic = 1usize << levels;
    let ok = |n: usize| n % block == 0 && n % dyadic == 0;
    if ok(img.height()) && ok(img.width()) {
        return Ok(img);
    }
    if !crop {
        return Err(Error::Dimension(format!(
            "image {}x{} must be divisible by the block size {block} and by 2^{levels} = {dyadic}; \
             pass --crop to trim it",
            img.height(),
            img.width()
        )));
    }
    let h = compatible_size(img.height(), block, levels)?;
    let w = compatible_size(img.width(), block, levels)?;
    img.crop(h, w)
}

fn build_operator(
    height: usize,
    width: usize,
    block: usize,
    levels: usize,
) -> Result<CombinedOperator<BlockDctDictionary, WaveletDictionary>, Error> {
    CombinedOperator::new(
        BlockDctDictionary::new(height, width, block)?,
        WaveletDictionary::new(height, width, levels)?,
    )
}

fn log_iterations(report: &RunReport) {
    for rec in &report.iterations {
        eprintln!(
            "iter {}: sigma {:.6e} lambda {:.3} residual {:.6e} f0_texture {:.2} f0_cartoon {:.2}",
            rec.n, rec.sigma, rec.lambda, rec.residual, rec.f0_texture, rec.f0_cartoon
        );
    }
    if let Some(t) = report.elapsed_seconds {
        eprintln!("solve time: {t:.3} s");
    }
}

fn write_report(report: &RunReport, path: Option<&Path>) -> Result<(), Error> {
    if let Some(path) = path {
        std::fs::write(path, report.to_csv())?;
    }
    Ok(())
}

fn cmd_decompose(args: DecomposeArgs) -> Result<(), Error> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let block = file.resolve("block", args.common.block)?.unwrap_or(DEFAULT_BLOCK);
    let levels = file.resolve("levels", args.common.levels)?.unwrap_or(DEFAULT_LEVELS);
    let defaults = SolverConfig::default();
    let mu = file.resolve("mu", args.mu)?.unwrap_or(defaults.mu_texture);
    let cfg = SolverConfig {
        outer: file.resolve("outer", args.common.outer)?.unwrap_or(defaults.outer),
        inner: file.resolve("inner", args.common.inner)?.unwrap_or(defaults.inner),
        sigma_decay: file
            .resolve("sigma-decay", args.common.sigma_decay)?
            .unwrap_or(defaults.sigma_decay),
        mu_texture: mu,
        mu_cartoon: mu,
    };

    let image = fit_image(read_image(&args.input)?, block, levels, args.common.crop)?;
    let comb = build_operator(image.height(), image.width(), block, levels)?;

    let started = Instant::now();
    let result = decompose(&image, &comb, &cfg)?;
    let mut report = RunReport::from_iterations(result.iterations.clone());
    report.config_note = Some(format!(
        "mode=decompose outer={} inner={} sigma_decay={} mu={} block={block} levels={levels}",
        cfg.outer, cfg.inner, cfg.sigma_decay, cfg.mu_texture
    ));
    report.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    log_iterations(&report);

    if let Some(path) = &args.out_texture {
        write_image(&result.texture_layer, path)?;
    }
    if let Some(path) = &args.out_cartoon {
        write_image(&result.cartoon_layer, path)?;
    }
    if let Some(path) = &args.out_coeffs {
        let mut joined = result.texture_coeffs.clone();
        joined.extend_from_slice(&result.cartoon_coeffs);
        write_coeffs(&joined, path)?;
    }
    write_report(&report, args.report.as_deref())?;
    Ok(())
}

fn cmd_inpaint(args: InpaintArgs) -> Result<(), Error> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let block = file.resolve("block", args.common.block)?.unwrap_or(DEFAULT_BLOCK);
    let levels = file.resolve("levels", args.common.levels)?.unwrap_or(DEFAULT_LEVELS);
    let defaults = InpaintConfig::default();
    let cfg = InpaintConfig {
        outer: file.resolve("outer", args.common.outer)?.unwrap_or(defaults.outer),
        inner: file.resolve("inner", args.common.inner)?.unwrap_or(defaults.inner),
        sigma_decay: file
            .resolve("sigma-decay", args.common.sigma_decay)?
            .unwrap_or(defaults.sigma_decay),
        lambda_max: file.resolve("lambda-max", args.lambda_max)?.unwrap_or(defaults.lambda_max),
        gamma: file.resolve("gamma", args.gamma)?.unwrap_or(defaults.gamma),
        mu_tv: file.resolve("mu-tv", args.mu_tv)?.unwrap_or(defaults.mu_tv),
        eps_tv: file.resolve("eps-tv", args.eps_tv)?.unwrap_or(defaults.eps_tv),
        mu_texture: None,
        mu_cartoon: None,
        reimpose: file.resolve("reimpose", args.reimpose)?.unwrap_or(defaults.reimpose),
    };

    let image = fit_image(read_image(&args.input)?, block, levels, args.common.crop)?;
    let mask_full = read_mask(&args.mask)?;
    let mask = if mask_full.height() == image.height() && mask_full.width() == image.width() {
        mask_full
    } else {
        mask_full.crop(image.height(), image.width())?
    };

    let comb = build_operator(image.height(), image.width(), block, levels)?;

    let started = Instant::now();
    let (restored, result) = inpaint(&image, &mask, &comb, &cfg)?;
    let mut report = RunReport::from_iterations(result.iterations.clone());
    report.config_note = Some(format!(
        "mode=inpaint outer={} inner={} sigma_decay={} lambda_max={} gamma={} mu_tv={} eps_tv={}          reimpose={} block={block} levels={levels}",
        cfg.outer, cfg.inner, cfg.sigma_decay, cfg.lambda_max, cfg.gamma, cfg.mu_tv, cfg.eps_tv,
        cfg.reimpose
    ));
    report.elapsed_seconds = Some(started.elapsed().as_secs_f64());

    if let Some(truth_path) = &args.truth {
        let truth = fit_image(read_image(truth_path)?, block, levels, args.common.crop)?;
        report.psnr = Some(psnr(&restored, &truth, None)?);
        report.psnr_missing = Some(psnr(&restored, &truth, Some(&mask))?);
    }
    log_iterations(&report);
    if let (Some(full), Some(missing)) = (report.psnr, report.psnr_missing) {
        eprintln!("psnr: {full:.4} dB overall, {missing:.4} dB over missing pixels");
    }

    write_image(&restored, &args.out)?;
    write_report(&report, args.report.as_deref())?;
    Ok(())
}

fn format_psnr(db: f64) -> String {
    if db.is_infinite() {
        "inf".to_string()
    } else {
        format!("{db:.4}")
    }
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), Error> {
    let a = read_image(&args.a)?;
    let b = read_image(&args.b)?;
    let mask = match &args.mask {
        Some(path) => Some(read_mask(path)?),
        None => None,
    };
    let db = psnr(&a, &b, mask.as_ref())?;
    println!("{}", format_psnr(db));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compatible_size_uses_the_lcm_of_both_constraints() {
        // block 32, levels 6 -> lcm(32, 64) = 64
        assert_eq!(compatible_size(130, 32, 6).unwrap(), 128);
        assert_eq!(compatible_size(64, 32, 6).unwrap(), 64);
        // block 48, levels 4 -> lcm(48, 16) = 48
        assert_eq!(compatible_size(100, 48, 4).unwrap(), 96);
        assert!(compatible_size(63, 32, 6).is_err());
    }

    #[test]
    fn psnr_formatting_matches_the_contract() {
        assert_eq!(format_psnr(f64::INFINITY), "inf");
        assert_eq!(format_psnr(6.020599913279624), "6.0206");
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(exit_code_for(&Error::Parameter("x".into())), 2);
        assert_eq!(exit_code_for(&Error::Dimension("x".into())), 2);
        assert_eq!(exit_code_for(&Error::Degenerate("x".into())), 2);
        assert_eq!(exit_code_for(&Error::Validation("x".into())), 2);
        assert_eq!(exit_code_for(&Error::Parse { offset: 0, message: "x".into() }), 3);
        assert_eq!(exit_code_for(&Error::Unsupported("x".into())), 3);
        assert_eq!(exit_code_for(&Error::Singular("x".into())), 4);
        assert_eq!(exit_code_for(&Error::NonFinite("x".into())), 4);
    }
}
