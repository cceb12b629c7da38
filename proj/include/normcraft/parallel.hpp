#pragma once

namespace normcraft {

// Worker count after applying the NORMCRAFT_THREADS cap (default: hardware).
int max_threads();

// Installs the cap process-wide. Called once from CLI / benchmark mains.
void apply_thread_env();

}  // namespace normcraft
