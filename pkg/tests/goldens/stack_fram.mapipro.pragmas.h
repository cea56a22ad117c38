/* mapipro section directives for stack_fram */
#pragma DATA_SECTION ( main, .Localvars)
#pragma DATA_SECTION ( func_1, .Localvars)
