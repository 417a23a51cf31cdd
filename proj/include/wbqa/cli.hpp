#pragma once

namespace wbqa {

// full operator surface: ingest, paraphrase, generate, run, score, report,
// replay-oracle; returns the process exit code
int run_cli(int argc, char** argv);

}  // namespace wbqa
