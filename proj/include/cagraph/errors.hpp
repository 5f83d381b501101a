#pragma once

#include <stdexcept>
#include <string>

namespace cagraph {

// Every failure the library reports derives from Error, so callers that don't
// care about the distinction can catch one type.  The message always names the
// offending task/field; the concrete class tells you which rule was broken.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define CAGRAPH_DEFINE_ERROR(Name)                                            \
  class Name : public Error {                                                 \
  public:                                                                     \
    using Error::Error;                                                       \
  }

// graph construction
CAGRAPH_DEFINE_ERROR(CycleError);        // dependency cycle; names a task on it
CAGRAPH_DEFINE_ERROR(DanglingEdge);      // edge endpoint is not a known task
CAGRAPH_DEFINE_ERROR(BadProc);           // processor index out of range
CAGRAPH_DEFINE_ERROR(DuplicateId);       // two tasks share an id
CAGRAPH_DEFINE_ERROR(UnknownTask);       // id/index not present in the graph

// covers
CAGRAPH_DEFINE_ERROR(OverlappingBlocks); // task in two blocks of one processor
CAGRAPH_DEFINE_ERROR(EmptyCover);        // no blocks at all
CAGRAPH_DEFINE_ERROR(InvalidCover);      // precondition "cover is valid" failed

// splits and macro-step plans
CAGRAPH_DEFINE_ERROR(TargetNotOwned);    // target set strays off its processor
CAGRAPH_DEFINE_ERROR(Unreachable);       // needed element neither receivable nor computable
CAGRAPH_DEFINE_ERROR(BadBlockSize);      // macro-step depth < 1
CAGRAPH_DEFINE_ERROR(MalformedSplit);    // split structure inconsistent
CAGRAPH_DEFINE_ERROR(MalformedPlan);     // plan fails well-formedness

// file formats
CAGRAPH_DEFINE_ERROR(ParseError);        // unreadable JSON/CSV
CAGRAPH_DEFINE_ERROR(SchemaError);       // readable but wrong shape/field

// generators
CAGRAPH_DEFINE_ERROR(BadShape);          // generator parameters out of range

// event simulation
CAGRAPH_DEFINE_ERROR(Deadlock);          // no runnable task; reports stuck frontier

#undef CAGRAPH_DEFINE_ERROR

} // namespace cagraph
