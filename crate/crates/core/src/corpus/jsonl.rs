//! Line-delimited JSON wire format for samples.
//!
//! One record per line. Derived samples carry `source_id`/`provenance` so a
//! reader can trace them back; plain corpus samples leave those fields out.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CorpusError, DialogueSample, DistilledSample, PersonaSentence, SampleFields, Utterance};

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: CorpusError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Wire form of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dialogue_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turn_index: Option<usize>,
    pub persona: Vec<String>,
    pub history: Vec<String>,
    pub response: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl SampleRecord {
    pub fn from_sample(sample: &DialogueSample) -> Self {
        SampleRecord {
            dialogue_id: Some(sample.dialogue_id.clone()),
            turn_index: Some(sample.turn_index),
            persona: sample.persona.iter().map(|p| p.text().to_string()).collect(),
            history: sample.history.iter().map(|u| u.text().to_string()).collect(),
            response: sample.response.text().to_string(),
            source_id: None,
            provenance: None,
            score: None,
        }
    }

    pub fn from_distilled(sample: &DistilledSample) -> Self {
        SampleRecord {
            dialogue_id: Some(sample.source_id.dialogue_id.clone()),
            turn_index: Some(sample.source_id.turn_index),
            persona: vec![sample.persona.text().to_string()],
            history: vec![sample.history.text().to_string()],
            response: sample.response.text().to_string(),
            source_id: Some(sample.source_id.key()),
            provenance: Some("distilled".into()),
            score: None,
        }
    }

    pub fn to_sample(&self) -> Result<DialogueSample, CorpusError> {
        DialogueSample::new(
            self.dialogue_id.clone().unwrap_or_default(),
            self.turn_index.unwrap_or(0),
            self.persona.iter().map(|p| PersonaSentence::new(p)).collect::<Result<_, _>>()?,
            self.history.iter().map(|h| Utterance::new(h)).collect::<Result<_, _>>()?,
            Utterance::new(&self.response)?,
        )
    }
}

impl SampleFields for SampleRecord {
    fn persona_texts(&self) -> Vec<&str> {
        self.persona.iter().map(String::as_str).collect()
    }

    fn history_texts(&self) -> Vec<&str> {
        self.history.iter().map(String::as_str).collect()
    }

    fn response_text(&self) -> &str {
        &self.response
    }
}

pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<SampleRecord>, JsonlError> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record =
            serde_json::from_str(&line).map_err(|source| JsonlError::Parse { line: i + 1, source })?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_jsonl<W: Write>(mut writer: W, records: &[SampleRecord]) -> Result<(), JsonlError> {
    for record in records {
        serde_json::to_writer(&mut writer, record).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Read and validate in one pass, reporting the offending line on failure.
pub fn read_samples<R: BufRead>(reader: R) -> Result<Vec<DialogueSample>, JsonlError> {
    read_jsonl(reader)?
        .iter()
        .enumerate()
        .map(|(i, r)| r.to_sample().map_err(|source| JsonlError::Invalid { line: i + 1, source }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_record_parses() {
        let line = r#"{"persona": ["i like cats"], "history": ["hi"], "response": "hello"}"#;
        let records = read_jsonl(line.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].persona, ["i like cats"]);
        assert!(records[0].source_id.is_none());
    }

    #[test]
    fn round_trip_preserves_records() {
        let records = vec![
            SampleRecord {
                dialogue_id: Some("d00000".into()),
                turn_index: Some(1),
                persona: vec!["i like cats".into()],
                history: vec!["hi".into(), "hello".into()],
                response: "yes i have two cats".into(),
                source_id: Some("d00000:1:0".into()),
                provenance: Some("distilled".into()),
                score: Some(0.25),
            },
            SampleRecord {
                dialogue_id: None,
                turn_index: None,
                persona: vec!["i ski".into()],
                history: vec!["yo".into()],
                response: "nice".into(),
                source_id: None,
                provenance: None,
                score: None,
            },
        ];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records).unwrap();
        assert_eq!(read_jsonl(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn absent_optionals_are_not_emitted() {
        let record = SampleRecord {
            dialogue_id: None,
            turn_index: None,
            persona: vec!["i ski".into()],
            history: vec!["yo".into()],
            response: "nice".into(),
            source_id: None,
            provenance: None,
            score: None,
        };
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &[record]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains("source_id"));
        assert!(!text.contains("dialogue_id"));
    }

    #[test]
    fn parse_error_reports_line() {
        let input = "{\"persona\": [\"a\"], \"history\": [\"b\"], \"response\": \"c\"}\nnot json\n";
        let err = read_jsonl(input.as_bytes()).unwrap_err();
        assert!(matches!(err, JsonlError::Parse { line: 2, .. }));
    }

    #[test]
    fn blank_lines_are_skipped() {
        let input = "\n{\"persona\": [\"a\"], \"history\": [\"b\"], \"response\": \"c\"}\n\n";
        assert_eq!(read_jsonl(input.as_bytes()).unwrap().len(), 1);
    }

    #[test]
    fn invalid_sample_reports_line() {
        let input = r#"{"persona": [], "history": ["b"], "response": "c"}"#;
        let err = read_samples(input.as_bytes()).unwrap_err();
        assert!(matches!(err, JsonlError::Invalid { line: 1, .. }));
    }
}
