//! Downloading NETLIB LP instances.

use std::io::Read;
use std::path::PathBuf;
use std::time::Duration;

use flate2::read::GzDecoder;
use log::{info, warn};
use oro_core::lp::parse_mps;

use crate::{Failure, FetchArgs};

pub const DEFAULT_MIRROR: &str = "https://www.netlib.org/lp/data";

/// `(name, columns, inequality rows, equality rows)` for instances whose size is checked.
const EXPECTED: &[(&str, usize, usize, usize)] = &[("capri", 353, 129, 142)];

const KNOWN: &[&str] = &[
    "25fv47", "80bau3b", "adlittle", "afiro", "agg", "agg2", "agg3", "bandm", "beaconfd", "blend", "bnl1", "bnl2",
    "boeing1", "boeing2", "bore3d", "brandy", "capri", "cycle", "czprob", "d2q06c", "d6cube", "degen2", "degen3",
    "dfl001", "e226", "etamacro", "fffff800", "finnis", "fit1d", "fit1p", "fit2d", "fit2p", "forplan", "ganges",
    "gfrd-pnc", "greenbea", "greenbeb", "grow15", "grow22", "grow7", "israel", "kb2", "lotfi", "maros", "maros-r7",
    "modszk1", "nesm", "perold", "pilot", "pilot.ja", "pilot.we", "pilot4", "pilot87", "pilotnov", "recipe", "sc105",
    "sc205", "sc50a", "sc50b", "scagr25", "scagr7", "scfxm1", "scfxm2", "scfxm3", "scorpion", "scrs8", "scsd1",
    "scsd6", "scsd8", "sctap1", "sctap2", "sctap3", "seba", "share1b", "share2b", "shell", "ship04l", "ship04s",
    "ship08l", "ship08s", "ship12l", "ship12s", "sierra", "stair", "standata", "standgub", "standmps", "stocfor1",
    "stocfor2", "tuff", "vtp.base", "wood1p", "woodw",
];

enum Fetched {
    Bytes(Vec<u8>),
    NotFound,
}

fn fetch_url(client: &reqwest::blocking::Client, url: &str) -> Result<Fetched, Failure> {
    if let Some(path) = url.strip_prefix("file://") {
        return match std::fs::read(path) {
            Ok(b) => Ok(Fetched::Bytes(b)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Fetched::NotFound),
            Err(e) => Err(Failure::External(format!("cannot read {path}: {e}"))),
        };
    }
    let resp = client.get(url).send().map_err(|e| {
        Failure::External(format!(
            "could not reach {url}: {e}. Check network access, or download the file yourself and pass --mirror file:///DIR"
        ))
    })?;
    let status = resp.status();
    if status == reqwest::StatusCode::NOT_FOUND {
        return Ok(Fetched::NotFound);
    }
    if !status.is_success() {
        return Err(Failure::External(format!("{url} answered {status}")));
    }
    let body = resp.bytes().map_err(|e| Failure::External(format!("reading {url}: {e}")))?;
    Ok(Fetched::Bytes(body.to_vec()))
}

fn decode(bytes: Vec<u8>) -> Result<String, Failure> {
    let raw = if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(&bytes[..])
            .read_to_end(&mut out)
            .map_err(|e| Failure::External(format!("bad gzip stream: {e}")))?;
        out
    } else {
        bytes
    };
    String::from_utf8(raw).map_err(|_| Failure::External("downloaded file is not text".into()))
}

fn looks_like_mps(text: &str) -> bool {
    text.lines().any(|l| l.trim_end() == "ROWS")
}

pub fn fetch_netlib(args: &FetchArgs) -> Result<(), Failure> {
    let name = args.name.to_ascii_lowercase();
    if !KNOWN.contains(&name.as_str()) {
        return Err(Failure::Usage(format!("unknown NETLIB instance '{}'", args.name)));
    }
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(60))
        .build()
        .map_err(|e| Failure::External(format!("http client: {e}")))?;
    let base = args.mirror.trim_end_matches('/');
    let mut found = None;
    for candidate in [format!("{name}.mps"), format!("{name}.mps.gz"), name.clone(), format!("{name}.gz")] {
        let url = format!("{base}/{candidate}");
        info!("trying {url}");
        if let Fetched::Bytes(b) = fetch_url(&client, &url)? {
            found = Some((url, b));
            break;
        }
    }
    let (url, bytes) = found.ok_or_else(|| Failure::External(format!("{name} not found under {base}")))?;
    let text = decode(bytes)?;
    if !looks_like_mps(&text) {
        return Err(Failure::External(format!(
            "{url} is not plain MPS; NETLIB serves most instances in its compressed emps form. \
             Expand it with NETLIB's emps program and pass the result via --mirror file:///DIR"
        )));
    }
    let lp = parse_mps(&text).map_err(|e| Failure::External(format!("{url}: {e}")))?;
    let dims = (lp.num_cols(), lp.ineq.len(), lp.eq.len());
    println!("columns={} inequalities={} equalities={}", dims.0, dims.1, dims.2);
    if let Some(&(_, c, i, e)) = EXPECTED.iter().find(|x| x.0 == name) {
        if dims == (c, i, e) {
            println!("dimension_check=ok");
        } else {
            warn!(
                "{name}: expected {c}/{i}/{e} columns/inequalities/equalities, parsed {}/{}/{}",
                dims.0, dims.1, dims.2
            );
            println!("dimension_check=mismatch");
        }
    }
    let dest = args.dest.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.mps")));
    if let Some(dir) = dest.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&dest, &text)?;
    println!("written={}", dest.display());
    Ok(())
}
