// SPDX-License-Identifier: Apache-2.0

//! Fetching templates and data from URLs given at session creation.

use reqwest::redirect::Policy;
use reqwest::{Client, Url};
use thiserror::Error;

use crate::config::FetchConfig;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("invalid source URL `{0}`")]
    BadUrl(String),
    #[error("only https:// sources are accepted, got `{0}`")]
    Scheme(String),
    #[error("upstream answered {status} for `{url}`")]
    Status { url: String, status: u16 },
    #[error("fetching `{url}` failed: {reason}")]
    Transport { url: String, reason: String },
    #[error("`{url}` is larger than the {limit}-byte limit")]
    TooLarge { url: String, limit: u64 },
    #[error("`{0}` is not UTF-8 text")]
    NotText(String),
}

impl FetchError {
    /// Whether the request itself was at fault, rather than the upstream.
    pub fn is_client_error(&self) -> bool {
        matches!(self, FetchError::BadUrl(_) | FetchError::Scheme(_))
    }

    pub fn upstream_status(&self) -> Option<u16> {
        match self {
            FetchError::Status { status, .. } => Some(*status),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fetcher {
    client: Client,
    cfg: FetchConfig,
}

impl Fetcher {
    pub fn new(cfg: FetchConfig) -> Self {
        let max = cfg.max_redirects;
        let allow_http = cfg.allow_http;
        let policy = Policy::custom(move |attempt| {
            if attempt.previous().len() > max {
                attempt.error(format!("more than {max} redirects"))
            } else if !allow_http && attempt.url().scheme() != "https" {
                attempt.error("redirect leaves https")
            } else {
                attempt.follow()
            }
        });
        let client = Client::builder()
            .redirect(policy)
            .timeout(cfg.timeout())
            .build()
            .expect("TLS backend initializes");
        Self { client, cfg }
    }

    pub fn check_url(&self, raw: &str) -> Result<Url, FetchError> {
        let url = Url::parse(raw).map_err(|_| FetchError::BadUrl(raw.to_string()))?;
        match url.scheme() {
            "https" => Ok(url),
            "http" if self.cfg.allow_http => Ok(url),
            _ => Err(FetchError::Scheme(raw.to_string())),
        }
    }

    pub async fn fetch_text(&self, raw: &str) -> Result<String, FetchError> {
        let url = self.check_url(raw)?;
        let transport = |e: reqwest::Error| FetchError::Transport {
            url: raw.to_string(),
            reason: e.to_string(),
        };
        let mut resp = self.client.get(url).send().await.map_err(transport)?;
        if !resp.status().is_success() {
            return Err(FetchError::Status {
                url: raw.to_string(),
                status: resp.status().as_u16(),
            });
        }
        let limit = self.cfg.max_bytes;
        let too_large = || FetchError::TooLarge {
            url: raw.to_string(),
            limit,
        };
        if resp.content_length().is_some_and(|n| n > limit) {
            return Err(too_large());
        }
        let mut body = Vec::new();
        while let Some(chunk) = resp.chunk().await.map_err(transport)? {
            if (body.len() + chunk.len()) as u64 > limit {
                return Err(too_large());
            }
            body.extend_from_slice(&chunk);
        }
        String::from_utf8(body).map_err(|_| FetchError::NotText(raw.to_string()))
    }
}
