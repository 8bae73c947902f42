use std::io::Write;
use std::path::PathBuf;

use crate::config::Format;
use crate::error::CliError;

/// Sends named documents to stdout, a file, or one file per name inside a directory.
pub struct Emitter {
    output: Option<PathBuf>,
    format: Format,
    multiple: bool,
    written: usize,
}

impl Emitter {
    pub fn new(output: Option<PathBuf>, format: Format, multiple: bool) -> Result<Self, CliError> {
        if let (Some(dir), true) = (&output, multiple) {
            std::fs::create_dir_all(dir)?;
        }
        Ok(Emitter {
            output,
            format,
            multiple,
            written: 0,
        })
    }

    pub fn emit(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let body = if body.ends_with('\n') {
            body.to_string()
        } else {
            format!("{body}\n")
        };
        match (&self.output, self.multiple) {
            (Some(dir), true) => std::fs::write(
                dir.join(format!("{name}.{}", self.format.extension())),
                body,
            )?,
            (Some(file), false) => std::fs::write(file, body)?,
            (None, multiple) => {
                let mut out = std::io::stdout().lock();
                if multiple {
                    if self.written > 0 {
                        writeln!(out)?;
                    }
                    match self.format {
                        Format::Csv => writeln!(out, "# {name}")?,
                        Format::Text => writeln!(out, "== {name} ==")?,
                        Format::Json => {}
                    }
                }
                out.write_all(body.as_bytes())?;
            }
        }
        self.written += 1;
        Ok(())
    }
}
