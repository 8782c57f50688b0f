//! Synthetic inputs and a quiet command driver for end-to-end runs.

use std::collections::BTreeSet;
use std::path::Path;

use clap::Parser;
use loire_cli::args::Command;
use loire_cli::commands;
use loire_cli::pgm::Pgm;
use loire_cli::{Cli, CliError, CliResult};

/// Parses `args` as a `loire` command line and runs it without printing
/// the usual summary.
pub fn invoke<S: AsRef<str>>(args: &[S]) -> CliResult<()> {
    let argv = std::iter::once("loire").chain(args.iter().map(AsRef::as_ref));
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::usage(e.to_string()))?;
    match cli.command {
        Command::Regress(a) => commands::regress::run(&a).map(drop),
        Command::Simulate(a) => commands::simulate::run(&a).map(drop),
        Command::Bgmodel(a) => commands::bgmodel::run(&a).map(drop),
        Command::Version(_) => Ok(()),
    }
}

pub fn write_frames(dir: &Path, frames: &[Pgm]) -> CliResult<()> {
    for (k, f) in frames.iter().enumerate() {
        f.write(&dir.join(format!("frame{k:03}.pgm")))?;
    }
    Ok(())
}

/// Static textured 32x32 background with a bright 6x6 square moving
/// across it. Truth entries are (column-major pixel index, frame).
pub fn moving_square(frames: usize) -> (Vec<Pgm>, BTreeSet<(usize, usize)>) {
    let (w, h) = (32, 32);
    let mut out = Vec::new();
    let mut truth = BTreeSet::new();
    for f in 0..frames {
        let (r0, c0) = (4 + f / 2, 1 + f);
        let mut px = vec![0u8; w * h];
        for r in 0..h {
            for c in 0..w {
                let inside = (r0..r0 + 6).contains(&r) && (c0..c0 + 6).contains(&c);
                let v = if inside {
                    truth.insert((c * h + r, f));
                    255
                } else {
                    50 + 3 * r + 2 * c + if (r / 4 + c / 4) % 2 == 0 { 10 } else { 0 }
                };
                px[r * w + c] = v as u8;
            }
        }
        out.push(Pgm::new(w, h, px).expect("size matches"));
    }
    (out, truth)
}

/// Mask hits and the largest per-pixel background spread over a
/// `bgmodel` output directory for 32x32 frames named `frameNNN.pgm`.
pub fn score_bgmodel(out_dir: &Path, frames: usize) -> CliResult<(BTreeSet<(usize, usize)>, u8)> {
    let mut detected = BTreeSet::new();
    let mut backgrounds = Vec::new();
    for f in 0..frames {
        let name = format!("frame{f:03}.pgm");
        let mask = Pgm::read(&out_dir.join("mask").join(&name))?;
        for r in 0..32 {
            for c in 0..32 {
                if mask.get(r, c) == 255 {
                    detected.insert((c * 32 + r, f));
                }
            }
        }
        backgrounds.push(Pgm::read(&out_dir.join("background").join(&name))?);
    }
    let mut spread = 0u8;
    for i in 0..32 * 32 {
        let vals = backgrounds.iter().map(|b| b.pixels[i]);
        let (lo, hi) = vals.fold((u8::MAX, 0), |(lo, hi), v| (lo.min(v), hi.max(v)));
        spread = spread.max(hi - lo);
    }
    Ok((detected, spread))
}
