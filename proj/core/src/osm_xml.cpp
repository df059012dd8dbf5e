#include "osm_xml.hpp"

#include "roam/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace roam::osmxml {

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char next() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) next();
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line); }
};

struct Element {
    std::string name;
    std::map<std::string, std::string> attrs;
    bool self_closing = false;
    bool closing = false; // </name>
    std::size_t line = 1;
};

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out += s[i];
            continue;
        }
        auto end = s.find(';', i);
        std::string_view ent = end == std::string_view::npos
                                   ? std::string_view{}
                                   : s.substr(i + 1, end - i - 1);
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else { out += s[i]; continue; }
        i = end;
    }
    return out;
}

// Parses the element starting at '<'. Skips comments, declarations and
// processing instructions by returning std::nullopt-equivalent (name empty).
Element parse_element(Cursor& c) {
    Element el;
    el.line = c.line;
    c.next(); // '<'
    if (c.eof()) c.fail("unexpected end of document inside tag");

    if (c.peek() == '?') { // <?xml ... ?>
        while (!c.eof() && c.peek() != '>') c.next();
        if (c.eof()) c.fail("unterminated declaration");
        c.next();
        return el;
    }
    if (c.peek() == '!') { // comment or doctype
        if (c.text.substr(c.pos, 3) == "!--") {
            auto end = c.text.find("-->", c.pos);
            if (end == std::string_view::npos) c.fail("unterminated comment");
            while (c.pos < end + 3) c.next();
            return el;
        }
        while (!c.eof() && c.peek() != '>') c.next();
        if (c.eof()) c.fail("unterminated <! section");
        c.next();
        return el;
    }
    if (c.peek() == '/') {
        el.closing = true;
        c.next();
    }

    while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_'))
        el.name += c.next();
    if (el.name.empty()) c.fail("expected element name after '<'");

    for (;;) {
        c.skip_ws();
        if (c.eof()) c.fail("unterminated tag <" + el.name + ">");
        if (c.peek() == '>') {
            c.next();
            return el;
        }
        if (c.peek() == '/') {
            c.next();
            c.skip_ws();
            if (c.eof() || c.peek() != '>') c.fail("expected '>' after '/'");
            c.next();
            el.self_closing = true;
            return el;
        }
        if (el.closing) c.fail("attributes not allowed in closing tag </" + el.name + ">");

        std::string key;
        while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                            c.peek() == '_' || c.peek() == ':' || c.peek() == '-'))
            key += c.next();
        if (key.empty()) c.fail("expected attribute name in <" + el.name + ">");
        c.skip_ws();
        if (c.eof() || c.peek() != '=') c.fail("expected '=' after attribute '" + key + "'");
        c.next();
        c.skip_ws();
        if (c.eof() || (c.peek() != '"' && c.peek() != '\''))
            c.fail("expected quoted value for attribute '" + key + "'");
        const char quote = c.next();
        std::string value;
        while (!c.eof() && c.peek() != quote) value += c.next();
        if (c.eof()) c.fail("unterminated value for attribute '" + key + "'");
        c.next();
        el.attrs[key] = decode_entities(value);
    }
}

const std::string& require_attr(const Element& el, const std::string& key) {
    auto it = el.attrs.find(key);
    if (it == el.attrs.end())
        throw ParseError("<" + el.name + "> missing attribute '" + key + "'", el.line);
    return it->second;
}

int64_t parse_i64(const Element& el, const std::string& key) {
    const std::string& s = require_attr(el, key);
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError("<" + el.name + "> attribute '" + key + "' is not an integer: " + s,
                         el.line);
    return v;
}

double parse_f64(const Element& el, const std::string& key) {
    const std::string& s = require_attr(el, key);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw ParseError("<" + el.name + "> attribute '" + key + "' is not a number: " + s,
                         el.line);
    return v;
}

} // namespace

OsmDocument parse_osm_xml(std::string_view text) {
    Cursor c{text};
    OsmDocument doc;
    OsmWay* open_way = nullptr;
    std::vector<std::string> open_stack;

    while (true) {
        // Skip character data between tags; the OSM subset carries no text content.
        while (!c.eof() && c.peek() != '<') c.next();
        if (c.eof()) break;

        Element el = parse_element(c);
        if (el.name.empty()) continue; // declaration or comment

        if (el.closing) {
            if (open_stack.empty() || open_stack.back() != el.name)
                throw ParseError("unexpected closing tag </" + el.name + ">", el.line);
            open_stack.pop_back();
            if (el.name == "way") open_way = nullptr;
            continue;
        }

        if (el.name == "node") {
            OsmNode n;
            n.id = parse_i64(el, "id");
            n.lat = parse_f64(el, "lat");
            n.lon = parse_f64(el, "lon");
            doc.nodes.push_back(n);
            if (!el.self_closing) open_stack.push_back(el.name);
        } else if (el.name == "way") {
            if (open_way) throw ParseError("nested <way> elements", el.line);
            OsmWay w;
            w.id = parse_i64(el, "id");
            doc.ways.push_back(std::move(w));
            if (el.self_closing) continue;
            open_way = &doc.ways.back();
            open_stack.push_back(el.name);
        } else if (el.name == "nd") {
            if (!open_way) throw ParseError("<nd> outside of <way>", el.line);
            open_way->node_refs.push_back(parse_i64(el, "ref"));
            if (!el.self_closing) open_stack.push_back(el.name);
        } else if (el.name == "tag") {
            if (open_way) open_way->tags[require_attr(el, "k")] = require_attr(el, "v");
            if (!el.self_closing) open_stack.push_back(el.name);
        } else {
            // Unknown element (osm, bounds, relation, member, ...): track nesting only.
            if (!el.self_closing) open_stack.push_back(el.name);
        }
    }

    if (!open_stack.empty())
        throw ParseError("unclosed element <" + open_stack.back() + "> at end of document",
                         c.line);
    return doc;
}

} // namespace roam::osmxml
