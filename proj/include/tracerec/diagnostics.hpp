#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tracerec {

using WarningSink = std::function<void(std::string_view)>;

/// Reports a non-fatal condition. The default sink writes "warning: ..." to stderr.
void warn(std::string_view message);

/// Installs `sink` and returns the previous one. Passing an empty sink restores
/// the stderr default.
WarningSink set_warning_sink(WarningSink sink);

/// Collects warnings emitted during its lifetime instead of printing them.
class WarningCapture {
  public:
    WarningCapture();
    ~WarningCapture();
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

    [[nodiscard]] const std::vector<std::string>& messages() const { return messages_; }
    [[nodiscard]] bool contains(std::string_view fragment) const;

  private:
    std::vector<std::string> messages_;
    WarningSink previous_;
};

}  // namespace tracerec
