//! Minimal NCBI E-utilities client: `esearch` for PMIDs, then `efetch` in
//! Medline text format. Requests are strictly sequential and spaced out to
//! stay within the public rate limit.

use std::io::Write;
use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::error::{Error, Result};

pub const DEFAULT_BASE_URL: &str = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
pub const API_KEY_ENV: &str = "NCBI_API_KEY";
pub const MAX_BATCH: usize = 200;

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub base_url: String,
    pub api_key: Option<String>,
    pub batch_size: usize,
    /// Minimum gap between the starts of consecutive requests.
    pub min_interval: Duration,
    pub attempts: u32,
    /// Wait before the first retry; doubled for each further one.
    pub backoff: Duration,
    pub timeout: Duration,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            api_key: None,
            batch_size: MAX_BATCH,
            min_interval: Duration::from_millis(340),
            attempts: 3,
            backoff: Duration::from_secs(1),
            timeout: Duration::from_secs(60),
        }
    }
}

pub struct PubMedClient {
    agent: ureq::Agent,
    config: FetchConfig,
    last_request: Option<Instant>,
}

#[derive(Deserialize)]
struct EsearchResponse {
    esearchresult: EsearchResult,
}

#[derive(Deserialize)]
struct EsearchResult {
    #[serde(default)]
    idlist: Vec<String>,
}

impl PubMedClient {
    pub fn new(config: FetchConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .user_agent(concat!("gextext/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        PubMedClient {
            agent,
            config,
            last_request: None,
        }
    }

    fn pace(&mut self) {
        if let Some(last) = self.last_request {
            let elapsed = last.elapsed();
            if elapsed < self.config.min_interval {
                thread::sleep(self.config.min_interval - elapsed);
            }
        }
        self.last_request = Some(Instant::now());
    }

    fn get(&mut self, endpoint: &str, params: &[(&str, &str)]) -> Result<String> {
        let url = format!("{}/{endpoint}", self.config.base_url.trim_end_matches('/'));
        let mut wait = self.config.backoff;
        let mut last_error = String::new();
        for attempt in 1..=self.config.attempts.max(1) {
            if attempt > 1 {
                log::warn!(
                    "{endpoint}: attempt {} failed ({last_error}); retrying in {wait:?}",
                    attempt - 1
                );
                thread::sleep(wait);
                wait *= 2;
            }
            self.pace();
            let mut request = self.agent.get(&url);
            for (k, v) in params {
                request = request.query(*k, *v);
            }
            if let Some(key) = &self.config.api_key {
                request = request.query("api_key", key);
            }
            match request.call() {
                Ok(mut response) => match response.body_mut().read_to_string() {
                    Ok(body) => return Ok(body),
                    Err(e) => last_error = e.to_string(),
                },
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(Error::Http(format!(
            "{endpoint} failed after {} attempts: {last_error}",
            self.config.attempts.max(1)
        )))
    }

    pub fn esearch(&mut self, query: &str, max_results: usize) -> Result<Vec<String>> {
        let retmax = max_results.to_string();
        let body = self.get(
            "esearch.fcgi",
            &[
                ("db", "pubmed"),
                ("term", query),
                ("retmax", &retmax),
                ("retmode", "json"),
            ],
        )?;
        let parsed: EsearchResponse =
            serde_json::from_str(&body).map_err(|e| Error::Http(format!("unexpected esearch response: {e}")))?;
        let mut ids = parsed.esearchresult.idlist;
        ids.truncate(max_results);
        Ok(ids)
    }

    pub fn efetch(&mut self, ids: &[String]) -> Result<String> {
        let joined = ids.join(",");
        self.get(
            "efetch.fcgi",
            &[
                ("db", "pubmed"),
                ("id", &joined),
                ("rettype", "medline"),
                ("retmode", "text"),
            ],
        )
    }
}

/// Searches PubMed and writes the Medline records of up to `max_results`
/// hits to `out`. Returns the number of PMIDs requested.
pub fn fetch_pubmed(config: FetchConfig, query: &str, max_results: usize, out: &Path) -> Result<usize> {
    if query.trim().is_empty() {
        return Err(Error::Usage("query must not be empty".into()));
    }
    if max_results == 0 {
        return Err(Error::Usage("max results must be at least 1".into()));
    }
    let batch = config.batch_size.clamp(1, MAX_BATCH);
    let mut client = PubMedClient::new(config);
    let ids = client.esearch(query, max_results)?;
    if ids.is_empty() {
        return Err(Error::NoResults);
    }
    let mut file = crate::formats::create(out)?;
    let io = |e: std::io::Error| Error::io(out, e);
    for (k, chunk) in ids.chunks(batch).enumerate() {
        log::info!("efetch batch {} ({} ids)", k + 1, chunk.len());
        let text = client.efetch(chunk)?;
        file.write_all(text.as_bytes()).map_err(io)?;
        if !text.ends_with("\n\n") {
            file.write_all(b"\n").map_err(io)?;
        }
    }
    file.flush().map_err(io)?;
    Ok(ids.len())
}
