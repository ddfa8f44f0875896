// Exception hierarchy shared by every stylo module.
#pragma once

#include <stdexcept>
#include <string>

namespace stylo {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define STYLO_DEFINE_ERROR(Name)                 \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

// corpus
STYLO_DEFINE_ERROR(MissingRoot);
STYLO_DEFINE_ERROR(EmptyCorpus);

class AuthorTooSmall : public Error {
public:
    explicit AuthorTooSmall(std::string author)
        : Error("author has fewer than 2 units: " + author), author_(std::move(author)) {}
    const std::string& author() const noexcept { return author_; }

private:
    std::string author_;
};

// attrib
STYLO_DEFINE_ERROR(SingleClass);
STYLO_DEFINE_ERROR(DimensionMismatch);
STYLO_DEFINE_ERROR(ModelFormatError);

// transforms / search / pairs
STYLO_DEFINE_ERROR(InapplicableAction);
STYLO_DEFINE_ERROR(NoActions);
STYLO_DEFINE_ERROR(TooFewStyles);
STYLO_DEFINE_ERROR(EmptyDataset);

// verification / plumbing
STYLO_DEFINE_ERROR(NoTests);
STYLO_DEFINE_ERROR(IoError);
STYLO_DEFINE_ERROR(ConfigError);

// experiment runner
class StageFailure : public Error {
public:
    StageFailure(std::string stage, const std::string& what)
        : Error("stage " + stage + " failed: " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

#undef STYLO_DEFINE_ERROR

}  // namespace stylo
