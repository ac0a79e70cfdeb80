//! Line-at-a-time identification with a worker pool.
//!
//! Input is read in batches; each batch is identified in parallel and
//! written back in input order, so the output does not depend on the number
//! of workers.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::identify::{Identifier, Prediction};

#[derive(Debug, Clone, Copy)]
pub struct StreamOptions {
    /// Worker threads; `None` uses one per CPU.
    pub threads: Option<usize>,
    pub batch_size: usize,
    /// Append every candidate's score as `code<TAB>score` pairs.
    pub with_scores: bool,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions {
            threads: None,
            batch_size: 4096,
            with_scores: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StreamStats {
    pub sentences: u64,
    pub elapsed: Duration,
}

impl StreamStats {
    pub fn sentences_per_second(&self) -> f64 {
        let secs = self.elapsed.as_secs_f64();
        if secs > 0.0 {
            self.sentences as f64 / secs
        } else {
            0.0
        }
    }
}

/// Output row: `index<TAB>winner<TAB>score`, plus score pairs if requested.
pub fn format_prediction(index: u64, prediction: &Prediction, with_scores: bool) -> String {
    let mut row = format!("{index}\t{}\t{}", prediction.winner, prediction.score);
    if with_scores {
        for (code, score) in &prediction.scores {
            let _ = write!(row, "\t{code}\t{score}");
        }
    }
    row.push('\n');
    row
}

/// Identifies every input line (blank lines included) against all modelled
/// languages. Sentence indices start at 0.
pub fn identify_stream<R: BufRead, W: Write>(
    id: &Identifier,
    input: R,
    mut output: W,
    options: &StreamOptions,
) -> Result<StreamStats> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = options.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let candidates = id.all_candidates();
    let batch_size = options.batch_size.max(1);
    let start = Instant::now();
    let io_err = |e| Error::io("<stream>", e);

    let mut lines = input.lines();
    let mut next_index = 0u64;
    let mut batch: Vec<String> = Vec::with_capacity(batch_size);
    loop {
        batch.clear();
        for line in lines.by_ref().take(batch_size) {
            let mut line = line.map_err(io_err)?;
            if line.ends_with('\r') {
                line.pop();
            }
            batch.push(line);
        }
        if batch.is_empty() {
            break;
        }
        let rows: Vec<String> = pool.install(|| {
            batch
                .par_iter()
                .enumerate()
                .map(|(i, sentence)| {
                    let p = id.identify(sentence, &candidates);
                    format_prediction(next_index + i as u64, &p, options.with_scores)
                })
                .collect()
        });
        for row in &rows {
            output.write_all(row.as_bytes()).map_err(io_err)?;
        }
        next_index += batch.len() as u64;
    }
    output.flush().map_err(io_err)?;
    Ok(StreamStats {
        sentences: next_index,
        elapsed: start.elapsed(),
    })
}
