#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace thinging {

/// 1-based line/column range inside a source file. End column is inclusive.
struct SourceSpan {
  std::string file;
  int start_line = 1;
  int start_col = 1;
  int end_line = 1;
  int end_col = 1;

  bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning };

/// A single finding. `code` is one of the registry strings below; `element`
/// names the model element the finding is about when there is one.
struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  std::string element;
  std::optional<SourceSpan> span;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

namespace codes {
inline constexpr std::string_view kSyntax = "E001";
inline constexpr std::string_view kUnresolvedPath = "E101";
inline constexpr std::string_view kIllegalFlowPair = "E102";
inline constexpr std::string_view kCrossBoundary = "E103";
inline constexpr std::string_view kFlowIntoCreate = "E104";
inline constexpr std::string_view kIdentityBreak = "E105";
inline constexpr std::string_view kDuplicateId = "E106";
inline constexpr std::string_view kSameThingTrigger = "W201";
inline constexpr std::string_view kIsolatedMachine = "W202";
inline constexpr std::string_view kRegionNotSubgraph = "E301";
inline constexpr std::string_view kChronologyCycle = "E302";
inline constexpr std::string_view kUnknownEvent = "E303";
inline constexpr std::string_view kUnresolvedChoice = "E401";
inline constexpr std::string_view kStepLimit = "E402";
inline constexpr std::string_view kUnconsumedChoice = "W401";
}  // namespace codes

/// Registry slug for a code ("E101" -> "unresolved-path"); empty if unknown.
std::string_view code_name(std::string_view code);

bool has_errors(const Diagnostics& diagnostics);
std::size_t count_code(const Diagnostics& diagnostics, std::string_view code);

Diagnostic make_error(std::string_view code, std::string element, std::string message,
                      std::optional<SourceSpan> span = std::nullopt);
Diagnostic make_warning(std::string_view code, std::string element, std::string message,
                        std::optional<SourceSpan> span = std::nullopt);

/// `SEVERITY CODE file:line:col message`. Without a span the location is
/// `file:element`.
std::string format_diagnostic(const Diagnostic& d, std::string_view file);

/// Hard failure carrying a registry code (simulation errors, bad scenarios).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Plain value with the diagnostics gathered while producing it. `value` is
/// present iff `diagnostics` holds no error.
template <class T>
struct Result {
  std::optional<T> value;
  Diagnostics diagnostics;

  bool ok() const { return value.has_value(); }
};

}  // namespace thinging
