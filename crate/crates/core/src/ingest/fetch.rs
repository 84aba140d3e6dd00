use std::fmt;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use log::info;
use serde::Serialize;
use thiserror::Error;
use url::Url;

use super::xml::{walk, Visit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetadataKind {
    Comps,
    Primary,
}

impl fmt::Display for MetadataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetadataKind::Comps => "comps",
            MetadataKind::Primary => "primary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FetchedFile {
    pub kind: MetadataKind,
    pub path: PathBuf,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FetchManifest {
    pub files: Vec<FetchedFile>,
}

impl FetchManifest {
    pub fn get(&self, kind: MetadataKind) -> Option<&FetchedFile> {
        self.files.iter().find(|f| f.kind == kind)
    }
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("network error fetching {url}: {message}")]
    Network { url: String, message: String },
    /// The repomd index has no reference for `kind`. Whatever could be
    /// fetched is still in `fetched`, so a missing comps file lets callers
    /// continue with packages only.
    #[error("repomd lists no {kind} metadata")]
    NotFound {
        kind: MetadataKind,
        fetched: FetchManifest,
    },
    #[error("cannot decompress {url}: {source}")]
    Decompress {
        url: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed repomd.xml: {0}")]
    MalformedRepomd(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn read_url(url: &Url) -> Result<Vec<u8>, FetchError> {
    let network = |message: String| FetchError::Network {
        url: url.to_string(),
        message,
    };
    match url.scheme() {
        "file" => {
            let path = url
                .to_file_path()
                .map_err(|_| network("not a local path".to_string()))?;
            fs::read(&path).map_err(|e| network(e.to_string()))
        }
        "http" | "https" => {
            let mut response = ureq::get(url.as_str())
                .call()
                .map_err(|e| network(e.to_string()))?;
            response
                .body_mut()
                .with_config()
                .limit(u64::MAX)
                .read_to_vec()
                .map_err(|e| network(e.to_string()))
        }
        other => Err(network(format!("unsupported scheme `{other}`"))),
    }
}

/// Picks the `primary` and comps (`group`, falling back to `group_gz`)
/// locations out of a repomd index.
fn repomd_locations(bytes: &[u8]) -> Result<(Option<String>, Option<String>), FetchError> {
    let mut current_type: Option<String> = None;
    let mut primary = None;
    let mut group = None;
    let mut group_gz = None;
    walk(bytes, "repomd", |visit| {
        match visit {
            Visit::Open(el) => {
                if el.is(&["repomd", "data"]) {
                    current_type = el.attr("type").map(str::to_string);
                }
            }
            Visit::Close(el) => {
                if el.is(&["repomd", "data", "location"]) {
                    if let (Some(kind), Some(href)) = (current_type.as_deref(), el.attr("href")) {
                        let slot = match kind {
                            "primary" => &mut primary,
                            "group" => &mut group,
                            "group_gz" => &mut group_gz,
                            _ => return Ok(()),
                        };
                        slot.get_or_insert_with(|| href.to_string());
                    }
                } else if el.is(&["repomd", "data"]) {
                    current_type = None;
                }
            }
        }
        Ok(())
    })
    .map_err(FetchError::MalformedRepomd)?;
    Ok((primary, group.or(group_gz)))
}

fn fetch_one(
    base: &Url,
    href: &str,
    kind: MetadataKind,
    dest: &Path,
) -> Result<FetchedFile, FetchError> {
    let url = base.join(href).map_err(|e| FetchError::Network {
        url: href.to_string(),
        message: e.to_string(),
    })?;
    let raw = read_url(&url)?;
    let file_name = href.rsplit('/').next().unwrap_or(href);
    let (file_name, data) = match file_name.strip_suffix(".gz") {
        Some(stem) => {
            let mut out = Vec::new();
            GzDecoder::new(raw.as_slice())
                .read_to_end(&mut out)
                .map_err(|source| FetchError::Decompress {
                    url: url.to_string(),
                    source,
                })?;
            (stem, out)
        }
        None => (file_name, raw),
    };
    let path = dest.join(file_name);
    fs::write(&path, &data).map_err(|source| FetchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    info!("fetched {kind} metadata from {url} ({} bytes)", data.len());
    Ok(FetchedFile {
        kind,
        path,
        bytes: data.len() as u64,
    })
}

/// Downloads the primary and comps files referenced by
/// `<base_url>/repodata/repomd.xml` into `dest`, gunzipping `.gz` payloads.
/// Downloads are sequential. `file://` URLs are read from disk.
pub fn fetch_repo_metadata(
    base_url: &str,
    dest: impl AsRef<Path>,
) -> Result<FetchManifest, FetchError> {
    let dest = dest.as_ref();
    let mut base = Url::parse(base_url).map_err(|e| FetchError::Network {
        url: base_url.to_string(),
        message: e.to_string(),
    })?;
    if !base.path().ends_with('/') {
        let path = format!("{}/", base.path());
        base.set_path(&path);
    }
    let repomd_url = base
        .join("repodata/repomd.xml")
        .expect("static relative path");
    let repomd = read_url(&repomd_url)?;
    let (primary, comps) = repomd_locations(&repomd)?;

    fs::create_dir_all(dest).map_err(|source| FetchError::Io {
        path: dest.display().to_string(),
        source,
    })?;

    let mut manifest = FetchManifest::default();
    let Some(primary) = primary else {
        return Err(FetchError::NotFound {
            kind: MetadataKind::Primary,
            fetched: manifest,
        });
    };
    manifest
        .files
        .push(fetch_one(&base, &primary, MetadataKind::Primary, dest)?);
    match comps {
        Some(comps) => {
            manifest
                .files
                .push(fetch_one(&base, &comps, MetadataKind::Comps, dest)?);
            Ok(manifest)
        }
        None => Err(FetchError::NotFound {
            kind: MetadataKind::Comps,
            fetched: manifest,
        }),
    }
}
