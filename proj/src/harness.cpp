#include "kzmps/harness.hpp"

// placeholder translation unit; implementation follows the core modules
namespace kzmps::harness {
std::string version_string() { return "0.1.0"; }
}
