#include "report.hpp"

#include <cmath>

namespace noembed::cli {

Json to_json(const LogScaledReal& v)
{
    if (v.fits_double() && (v.is_zero() || v.logmag() > -700.0)) return to_json(v.to_double());
    return Json{{"sign", v.sign()}, {"logmag", v.logmag()}};
}

Json to_json(double v)
{
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Check& Report::add(std::string name, std::string anchor)
{
    Check c;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    checks_.push_back(std::move(c));
    return checks_.back();
}

bool Report::all_pass() const
{
    for (const Check& c : checks_)
        if (!c.pass) return false;
    return true;
}

Json Report::body() const
{
    Json j;
    j["schema"] = "noembed-report/1";
    j["command"] = command_;
    j["target"] = target_;
    j["config"] = config_;
    Json list = Json::array();
    std::size_t passed = 0;
    for (const Check& c : checks_) {
        Json e;
        e["name"] = c.name;
        e["anchor"] = c.anchor;
        e["inputs"] = c.inputs;
        e["values"] = c.values;
        e["margins"] = c.margins;
        e["pass"] = c.pass;
        list.push_back(std::move(e));
        passed += c.pass;
    }
    j["checks"] = std::move(list);
    j["summary"] = {{"checks", checks_.size()}, {"passed", passed}, {"failed", checks_.size() - passed}, {"pass", all_pass()}};
    return j;
}

Json Report::document(double total_seconds) const
{
    Json j = body();
    Json rt;
    rt["total_seconds"] = total_seconds;
    Json per = Json::object();
    for (const Check& c : checks_) per[c.name] = c.seconds;
    rt["checks"] = std::move(per);
    Json st = Json::object();
    for (const auto& [name, s] : stages_) st[name] = s;
    rt["stages"] = std::move(st);
    j["runtime"] = std::move(rt);
    return j;
}

} // namespace noembed::cli
