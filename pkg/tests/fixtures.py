"""Shared test inputs: two real QEMU functions exercising the C subset."""

SCSI_ABORT = """\
void scsi_req_abort(SCSIRequest *req, int status) {
    if (!req->enqueued) {
        return;
    }
    scsi_req_ref(req);
    scsi_req_dequeue(req);
    req->io_canceled = true;
    if (req->ops->cancel_io) {
        req->ops->cancel_io(req);
    }
    scsi_req_complete(req, status);
    scsi_req_unref(req);
}
"""

SHR_CC = """\
uint32_t HELPER(shr_cc)(CPUM68KState *env, uint32_t val, uint32_t shift) {
    uint64_t temp;
    uint32_t result;
    shift &= 63;
    temp = (uint64_t)val << 32 >> shift;
    result = temp >> 32;
    env->cc_c = (temp >> 31) & 1;
    env->cc_n = result;
    env->cc_z = result;
    env->cc_v = 0;
    env->cc_x = shift ? env->cc_c : env->cc_x;
    return result;
}
"""
