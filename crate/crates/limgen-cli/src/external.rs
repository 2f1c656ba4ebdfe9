//! Adapter for generators running as child processes.
//!
//! Protocol: the harness writes one line `history (c,k) (c,k) ...` per step
//! to the child's standard input and reads one `(c,k)` line back. Resetting
//! restarts the child, which gives the refutation adversary its fresh state
//! between prefix queries.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use limgen_core::generator::{Generator, GeneratorStep};
use limgen_core::{Element, Error};

pub struct ExternalGenerator {
    command: Vec<String>,
    history: Vec<Element>,
    child: Option<Running>,
}

struct Running {
    process: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl ExternalGenerator {
    /// `spec` is the command line after the `external:` prefix.
    pub fn from_spec(spec: &str) -> Result<ExternalGenerator, Error> {
        let command: Vec<String> = spec.split_whitespace().map(str::to_string).collect();
        if command.is_empty() {
            return Err(Error::GeneratorIo("empty external command".to_string()));
        }
        Ok(ExternalGenerator {
            command,
            history: Vec::new(),
            child: None,
        })
    }

    fn spawn(&mut self) -> Result<&mut Running, Error> {
        if self.child.is_none() {
            let mut process = Command::new(&self.command[0])
                .args(&self.command[1..])
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::null())
                .spawn()
                .map_err(|e| Error::GeneratorIo(format!("spawn {}: {e}", self.command[0])))?;
            let stdin = process
                .stdin
                .take()
                .ok_or_else(|| Error::GeneratorIo("no child stdin".to_string()))?;
            let stdout = process
                .stdout
                .take()
                .ok_or_else(|| Error::GeneratorIo("no child stdout".to_string()))?;
            self.child = Some(Running {
                process,
                stdin,
                stdout: BufReader::new(stdout),
            });
        }
        Ok(self.child.as_mut().expect("just spawned"))
    }

    fn stop(&mut self) {
        if let Some(mut running) = self.child.take() {
            let _ = running.process.kill();
            let _ = running.process.wait();
        }
    }
}

impl Generator for ExternalGenerator {
    fn observe(&mut self, x: Element) {
        self.history.push(x);
    }

    fn emit(&mut self) -> Result<GeneratorStep, Error> {
        if self.history.is_empty() {
            return Err(Error::EmptyHistory);
        }
        let mut line = String::from("history");
        for e in &self.history {
            line.push(' ');
            line.push_str(&e.to_string());
        }
        line.push('\n');
        let running = self.spawn()?;
        running
            .stdin
            .write_all(line.as_bytes())
            .and_then(|()| running.stdin.flush())
            .map_err(|e| Error::GeneratorIo(format!("write: {e}")))?;
        let mut reply = String::new();
        running
            .stdout
            .read_line(&mut reply)
            .map_err(|e| Error::GeneratorIo(format!("read: {e}")))?;
        if reply.is_empty() {
            return Err(Error::GeneratorIo("child closed its output".to_string()));
        }
        let output: Element = reply
            .trim()
            .parse()
            .map_err(|_| Error::GeneratorIo(format!("bad reply: {}", reply.trim())))?;
        Ok(GeneratorStep {
            output,
            chain_index: None,
            truncated: false,
        })
    }

    fn reset(&mut self) -> Result<(), Error> {
        self.history.clear();
        self.stop();
        Ok(())
    }
}

impl Drop for ExternalGenerator {
    fn drop(&mut self) {
        self.stop();
    }
}
